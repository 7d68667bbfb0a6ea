//! Classical probability theory on a product of finite alphabets.

use num_traits::{One, Zero};

use crate::boxworld::{self, BoxSpec, BoxState, Signature};
use crate::error::{Error, Result};
use crate::framework::{Effect, Measurement};
use crate::rational::{self, Rational};

/// Distribution over the joint alphabet `dims[0] x dims[1] x ...`, first
/// letter most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassicalState {
    dims: Vec<usize>,
    probs: Vec<Rational>,
}

impl ClassicalState {
    pub fn new(dims: Vec<usize>, probs: Vec<Rational>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidSystem(format!("classical alphabet sizes {dims:?}")));
        }
        let n: usize = dims.iter().product();
        if probs.len() != n {
            return Err(Error::InvalidState(format!("{} probabilities for {n} letters", probs.len())));
        }
        if let Some(i) = probs.iter().position(|p| p < &Rational::zero()) {
            return Err(Error::InvalidState(format!("negative probability at letter {i}")));
        }
        let total = rational::sum(&probs);
        if !total.is_one() {
            return Err(Error::Normalization(format!("probabilities sum to {}", rational::format(&total))));
        }
        Ok(Self { dims, probs })
    }

    /// Single-alphabet distribution.
    pub fn from_probs(probs: Vec<Rational>) -> Result<Self> {
        Self::new(vec![probs.len()], probs)
    }

    pub fn uniform(d: usize) -> Self {
        Self { dims: vec![d], probs: vec![rational::ratio(1, d as i64); d] }
    }

    pub fn point_mass(d: usize, letter: usize) -> Result<Self> {
        if letter >= d {
            return Err(Error::OutOfRange(format!("letter {letter} of a {d}-letter alphabet")));
        }
        let mut probs = vec![Rational::zero(); d];
        probs[letter] = Rational::one();
        Ok(Self { dims: vec![d], probs })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        self.probs.iter().map(rational::to_f64).collect()
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn shannon_entropy(&self) -> f64 {
        crate::info::shannon_exact(&self.probs)
    }

    pub fn tensor(&self, other: &ClassicalState) -> ClassicalState {
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        let probs = self.probs.iter().flat_map(|a| other.probs.iter().map(move |b| a * b)).collect();
        ClassicalState { dims, probs }
    }

    /// Distribution of the letters at positions `keep`, in that order.
    pub fn marginal(&self, keep: &[usize]) -> Result<ClassicalState> {
        self.as_box().marginal(keep).map(|b| Self::from_box(&b).expect("classical marginal"))
    }

    /// Conditions on the letters at positions `on` taking values `values`.
    pub fn condition(&self, on: &[usize], values: &[usize]) -> Result<(Rational, ClassicalState)> {
        let zeros = vec![0; on.len()];
        let (p, rest) = self.as_box().condition_on(on, &zeros, values)?;
        Ok((p, Self::from_box(&rest)?))
    }

    /// The same distribution as a product of single-input boxes.
    pub fn as_box(&self) -> BoxState {
        let sig = Signature::new(self.dims.iter().map(|&d| BoxSpec::classical(d)).collect()).expect("dims validated");
        BoxState::from_parts(sig, self.probs.clone())
    }

    pub fn from_box(state: &BoxState) -> Result<ClassicalState> {
        if !state.is_classical() {
            return Err(Error::SystemMismatch(format!("{} has inputs", state.signature())));
        }
        Ok(ClassicalState {
            dims: state.signature().boxes().iter().map(|b| b.outputs).collect(),
            probs: state.table().to_vec(),
        })
    }

    pub fn outcome_label(&self, letter: usize) -> String {
        boxworld::label(&boxworld::decode(letter, self.dims.iter().copied()))
    }
}

/// The fiducial measurement on a joint alphabet: one point-mass effect per
/// letter.
pub fn fiducial_measurement(dims: &[usize]) -> Measurement {
    let n: usize = dims.iter().product();
    let outcomes = (0..n)
        .map(|r| {
            let mut q = vec![Rational::zero(); n];
            q[r] = Rational::one();
            (boxworld::label(&boxworld::decode(r, dims.iter().copied())), Effect::Classical(q))
        })
        .collect();
    Measurement::new_unchecked(outcomes)
}

/// Fine-grained measurements up to relabelling and trivial refinement: the
/// fiducial one only.
pub fn fine_grained_measurements(dims: &[usize]) -> Vec<Measurement> {
    vec![fiducial_measurement(dims)]
}
