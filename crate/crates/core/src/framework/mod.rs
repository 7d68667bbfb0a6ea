//! Theory-independent layer: system types, states, effects, measurements
//! and the operational distance.

mod distance;
mod measurement;

use serde::{Deserialize, Serialize};

use crate::boxworld::{BoxState, Signature};
use crate::classical::ClassicalState;
use crate::error::{Error, Result};
use crate::quantum::DensityMatrix;

pub use distance::{box_distance_exact, distance, distance_with_limit};
pub use measurement::{
    apply_measurement, coarse_grain, is_trivial_refinement, Effect, Measurement, OutcomeDistribution, Probabilities,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Classical,
    Quantum,
    Boxworld,
}

impl std::fmt::Display for Theory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Theory::Classical => "classical",
            Theory::Quantum => "quantum",
            Theory::Boxworld => "boxworld",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemType {
    /// Alphabet size per classical subsystem.
    Classical {
        dims: Vec<usize>,
    },
    /// Hilbert-space dimension per tensor factor.
    Quantum {
        dims: Vec<usize>,
    },
    BoxWorld(Signature),
}

impl SystemType {
    pub fn theory(&self) -> Theory {
        match self {
            SystemType::Classical { .. } => Theory::Classical,
            SystemType::Quantum { .. } => Theory::Quantum,
            SystemType::BoxWorld(_) => Theory::Boxworld,
        }
    }

    pub fn num_subsystems(&self) -> usize {
        match self {
            SystemType::Classical { dims } | SystemType::Quantum { dims } => dims.len(),
            SystemType::BoxWorld(sig) => sig.len(),
        }
    }

    /// Largest number of outcomes a fine-grained measurement needs.
    pub fn max_outcomes(&self) -> usize {
        match self {
            SystemType::Classical { dims } | SystemType::Quantum { dims } => dims.iter().product(),
            SystemType::BoxWorld(sig) => sig.output_count(),
        }
    }
}

/// A validated state of one of the implemented theories.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Classical(ClassicalState),
    Quantum(DensityMatrix),
    Box(BoxState),
}

impl From<ClassicalState> for State {
    fn from(s: ClassicalState) -> Self {
        State::Classical(s)
    }
}

impl From<DensityMatrix> for State {
    fn from(s: DensityMatrix) -> Self {
        State::Quantum(s)
    }
}

impl From<BoxState> for State {
    fn from(s: BoxState) -> Self {
        State::Box(s)
    }
}

impl State {
    pub fn system(&self) -> SystemType {
        match self {
            State::Classical(c) => SystemType::Classical { dims: c.dims().to_vec() },
            State::Quantum(q) => SystemType::Quantum { dims: q.dims().to_vec() },
            State::Box(b) => SystemType::BoxWorld(b.signature().clone()),
        }
    }

    pub fn theory(&self) -> Theory {
        self.system().theory()
    }

    pub fn num_subsystems(&self) -> usize {
        match self {
            State::Classical(c) => c.num_subsystems(),
            State::Quantum(q) => q.num_subsystems(),
            State::Box(b) => b.num_subsystems(),
        }
    }

    /// Reduced state on `keep`, in that order.
    pub fn marginal(&self, keep: &[usize]) -> Result<State> {
        if keep.is_empty() {
            return Err(Error::OutOfRange("marginal on no subsystems".into()));
        }
        Ok(match self {
            State::Classical(c) => State::Classical(c.marginal(keep)?),
            State::Quantum(q) => State::Quantum(q.partial_trace(keep)?),
            State::Box(b) => State::Box(b.marginal(keep)?),
        })
    }

    /// Classical states become single-input boxes; quantum states have no
    /// box form.
    pub fn to_box(&self) -> Option<BoxState> {
        match self {
            State::Classical(c) => Some(c.as_box()),
            State::Box(b) => Some(b.clone()),
            State::Quantum(_) => None,
        }
    }
}
