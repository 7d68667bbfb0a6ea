//! Entropic quantities over the implemented theories.
//!
//! Every infimum over fine-grained measurements is a minimum over a finite
//! family: the fiducial measurement for classical states, the eigenbasis
//! for quantum states, and all adaptive strategies in box world. Minima are
//! taken in enumeration order and a later candidate only replaces the
//! current one if it is smaller by more than [`TIE_TOLERANCE`].

mod conditional;
mod decomposition;
mod reasonableness;

use rayon::prelude::*;
use serde::Serialize;

use crate::boxworld::{enumerate_adaptive_strategies, AdaptiveStrategy, BoxState, Signature, StrategyOptions};
use crate::error::{Error, Result};
use crate::framework::State;
use crate::info::{self, RenyiOrder};
use crate::quantum::{self, Povm};

pub use decomposition::Decomposition;
pub use reasonableness::{ReasonablenessReport, SsaReport};

pub const TIE_TOLERANCE: f64 = 1e-12;

/// Values within this of zero count as zero in predicates.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Number of random rank-one POVMs tried for quantum Rényi entropies.
pub const QUANTUM_RENYI_SAMPLES: u64 = 200;

pub const MAX_STRATEGIES_ENV: &str = "GPT_ENTROPY_MAX_STRATEGIES";

/// Enumeration guards. Exceeding any of them is a hard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_subsystems: usize,
    /// Bound on the product of per-subsystem output counts.
    pub max_outcomes: usize,
    /// Bound on the trees examined at any level of strategy enumeration, and
    /// on strategy pairs for accessible information.
    pub max_strategies: u128,
    /// Bound on coordinate subsets examined by vertex enumeration.
    pub max_vertex_candidates: u128,
    /// Conditioning branches above which merged outcomes are not searched.
    pub coarse_grain_max_outcomes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_subsystems: 4,
            max_outcomes: 64,
            max_strategies: 1_000_000,
            max_vertex_candidates: 1_000_000,
            coarse_grain_max_outcomes: 8,
        }
    }
}

impl Limits {
    /// Defaults, with the strategy guard taken from the environment if set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Self::default();
        if let Ok(v) = std::env::var(MAX_STRATEGIES_ENV) {
            limits.max_strategies = v
                .trim()
                .parse()
                .map_err(|_| Error::OutOfRange(format!("{MAX_STRATEGIES_ENV}={v:?} is not a positive integer")))?;
            if limits.max_strategies == 0 {
                return Err(Error::OutOfRange(format!("{MAX_STRATEGIES_ENV} must be positive")));
            }
        }
        Ok(limits)
    }
}

/// Which measurement or decomposition attains a reported value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The letter-by-letter measurement of a classical state.
    Fiducial,
    /// Measurement in the eigenbasis of a density matrix.
    Eigenbasis,
    /// Best of the eigenbasis and a random rank-one POVM search.
    EigenbasisAndRandomSearch {
        samples: u64,
        best_sample: Option<u64>,
    },
    Strategy {
        index: usize,
        tree: String,
    },
    /// The unit measurement on the conditioning system.
    Unit,
    /// A strategy on the conditioning system, with its outcome groups when
    /// merged outcomes did better than the fine-grained ones.
    Conditioning {
        index: usize,
        tree: String,
        groups: Option<Vec<Vec<String>>>,
    },
    StrategyPair {
        a_index: usize,
        a_tree: String,
        b_index: usize,
        b_tree: String,
    },
    Decomposition {
        weights: Vec<String>,
        vertices: Vec<usize>,
        entangled: usize,
    },
    /// Combination of other reported quantities.
    Derived {
        terms: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub quantity: String,
    pub value_bits: f64,
    pub witness: Witness,
    /// True when the value is a minimum over a sufficient finite family.
    pub exact: bool,
}

impl EntropyReport {
    fn new(quantity: impl Into<String>, value_bits: f64, witness: Witness, exact: bool) -> Self {
        Self { quantity: quantity.into(), value_bits, witness, exact }
    }
}

/// Split of subsystem indices into the system of interest `a` and the
/// conditioning system `b`, which may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Partition {
    pub fn new(a: Vec<usize>, b: Vec<usize>) -> Self {
        Self { a, b }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if self.a.is_empty() {
            return Err(Error::OutOfRange("partition has an empty first part".into()));
        }
        let all: Vec<usize> = self.a.iter().chain(&self.b).copied().collect();
        for (i, &s) in all.iter().enumerate() {
            if s >= n {
                return Err(Error::OutOfRange(format!("subsystem {s} of a {n}-partite state")));
            }
            if all[..i].contains(&s) {
                return Err(Error::OutOfRange(format!("subsystem {s} appears twice in the partition")));
            }
        }
        Ok(())
    }
}

/// Index of the first minimum under the tie rule.
pub(crate) fn first_min(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if v < values[b] - TIE_TOLERANCE => best = Some(i),
            _ => {}
        }
    }
    best
}

pub(crate) fn first_max(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if v > values[b] + TIE_TOLERANCE => best = Some(i),
            _ => {}
        }
    }
    best
}

/// Entry point for all entropic quantities, carrying the enumeration guards.
#[derive(Debug, Clone, Default)]
pub struct Engine {
    pub limits: Limits,
}

impl Engine {
    pub fn new(limits: Limits) -> Self {
        Self { limits }
    }

    pub(crate) fn check_box(&self, state: &BoxState) -> Result<()> {
        let sig = state.signature();
        if sig.len() > self.limits.max_subsystems {
            return Err(Error::guard("subsystems", sig.len() as u128, self.limits.max_subsystems as u128));
        }
        if sig.output_count() > self.limits.max_outcomes {
            return Err(Error::guard("joint outcomes", sig.output_count() as u128, self.limits.max_outcomes as u128));
        }
        Ok(())
    }

    pub fn strategies(&self, sig: &Signature) -> Result<Vec<AdaptiveStrategy>> {
        enumerate_adaptive_strategies(sig, StrategyOptions::default(), self.limits.max_strategies)
    }

    /// Minimum of `objective` over every strategy, evaluated in parallel.
    fn box_minimum<F>(&self, state: &BoxState, strategies: &[AdaptiveStrategy], objective: F) -> (f64, usize)
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let table = state.table_f64();
        let m = state.signature().output_count();
        let values: Vec<f64> = strategies.par_iter().map(|s| objective(&s.apply_f64(&table, m))).collect();
        let k = first_min(&values).expect("at least one strategy");
        (values[k], k)
    }

    /// Measurement entropy of a box state, with the strategy that attains it.
    pub fn hhat_box(&self, state: &BoxState) -> Result<EntropyReport> {
        self.box_renyi(state, RenyiOrder::Finite(1.0), "H")
    }

    fn box_renyi(&self, state: &BoxState, order: RenyiOrder, quantity: &str) -> Result<EntropyReport> {
        self.check_box(state)?;
        if state.is_classical() {
            let v = info::renyi(&state.table_f64(), order);
            return Ok(EntropyReport::new(quantity, v, Witness::Fiducial, true));
        }
        let strategies = self.strategies(state.signature())?;
        let (v, k) = self.box_minimum(state, &strategies, |p| info::renyi(p, order));
        Ok(EntropyReport::new(
            quantity,
            v,
            Witness::Strategy { index: k, tree: strategies[k].tree().to_string() },
            true,
        ))
    }

    /// Minimal Shannon entropy of the outcomes of a fine-grained measurement.
    pub fn hhat(&self, state: &State) -> Result<EntropyReport> {
        match state {
            State::Classical(c) => {
                self.check_box(&c.as_box())?;
                Ok(EntropyReport::new("H", c.shannon_entropy(), Witness::Fiducial, true))
            }
            State::Quantum(rho) => {
                Ok(EntropyReport::new("H", quantum::von_neumann_entropy(rho), Witness::Eigenbasis, true))
            }
            State::Box(b) => self.hhat_box(b),
        }
    }

    /// Measurement entropy of the marginal on `subsystems`.
    pub fn hhat_of(&self, state: &State, subsystems: &[usize]) -> Result<EntropyReport> {
        self.hhat(&state.marginal(subsystems)?)
    }

    /// Minimal Rényi entropy of order `order`. Quantum values are upper
    /// bounds from the eigenbasis and a seeded random POVM search.
    pub fn hhat_alpha(&self, state: &State, order: RenyiOrder) -> Result<EntropyReport> {
        let quantity = format!("H_{order}");
        if order.is_shannon() {
            let mut r = self.hhat(state)?;
            r.quantity = quantity;
            return Ok(r);
        }
        match state {
            State::Classical(c) => {
                self.check_box(&c.as_box())?;
                Ok(EntropyReport::new(quantity, info::renyi(&c.probs_f64(), order), Witness::Fiducial, true))
            }
            State::Quantum(rho) => {
                let eig = Povm::eigenbasis(rho);
                let mut best = info::renyi(&eig.probabilities(rho)?, order);
                let mut best_sample = None;
                let d = rho.dim();
                for seed in 0..QUANTUM_RENYI_SAMPLES {
                    let povm = quantum::sample_random_rank1_povm(d, d + (seed as usize % (d + 1)), seed)?;
                    let v = info::renyi(&povm.probabilities(rho)?, order);
                    if v < best - TIE_TOLERANCE {
                        best = v;
                        best_sample = Some(seed);
                    }
                }
                Ok(EntropyReport::new(
                    quantity,
                    best,
                    Witness::EigenbasisAndRandomSearch { samples: QUANTUM_RENYI_SAMPLES, best_sample },
                    false,
                ))
            }
            State::Box(b) => self.box_renyi(b, order, &quantity),
        }
    }
}
