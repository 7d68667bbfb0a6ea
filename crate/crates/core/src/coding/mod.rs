//! Source coding for classical sources: typical sets, a compression
//! simulator, finite-N hypothesis testing and subspace dimensions.
//!
//! Sequences are grouped into type classes (letter counts, with letters of
//! equal probability merged), so costs scale with the number of types
//! rather than with `d^n`.

mod compression;
mod dimension;
mod hypothesis;
mod typical;

use num_traits::{One, Signed, Zero};

use crate::classical::ClassicalState;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub use compression::{failure_sequence, simulate_compression, CompressionReport};
pub use dimension::{dimension_of, subspace_of, StateSet};
pub use hypothesis::{
    hypothesis_test_pn, hypothesis_test_pn_with, relative_entropy_estimate, HypothesisReport, HYPOTHESIS_EXACT_MAX_N,
};
pub use typical::{typical_mass_and_count, TypicalReport};

pub const MAX_ALPHABET: usize = 16;

/// Largest `n` for which masses and counts are computed in exact arithmetic.
pub const EXACT_MAX_N: usize = 2000;

pub const MAX_N: usize = 10_000;

/// Bound on the number of type classes enumerated.
pub const MAX_TYPES: u128 = 10_000_000;

/// Slack on the typicality and likelihood comparisons.
pub const TYPICALITY_SLACK: f64 = 1e-12;

/// A memoryless classical source emitting `states[k]` with probability
/// `weights[k]`. All states share one alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    states: Vec<ClassicalState>,
    weights: Vec<Rational>,
    mixed: ClassicalState,
}

impl Source {
    pub fn new(states: Vec<ClassicalState>, weights: Vec<Rational>) -> Result<Self> {
        if states.is_empty() || states.len() != weights.len() {
            return Err(Error::InvalidState(format!("{} states with {} weights", states.len(), weights.len())));
        }
        let d = states[0].alphabet_size();
        if d > MAX_ALPHABET {
            return Err(Error::guard("source alphabet", d as u128, MAX_ALPHABET as u128));
        }
        if states.iter().any(|s| s.num_subsystems() != 1 || s.alphabet_size() != d) {
            return Err(Error::SystemMismatch("source states must share one single-letter alphabet".into()));
        }
        if weights.iter().any(|w| w.is_negative()) || !rational::sum(&weights).is_one() {
            return Err(Error::Normalization("source weights must be a probability vector".into()));
        }
        let mut mixed = vec![Rational::zero(); d];
        for (s, w) in states.iter().zip(&weights) {
            for (m, p) in mixed.iter_mut().zip(s.probs()) {
                *m += w * p;
            }
        }
        let mixed = ClassicalState::from_probs(mixed)?;
        Ok(Self { states, weights, mixed })
    }

    /// Source emitting point masses on letters with probabilities `probs`.
    pub fn letters(probs: Vec<Rational>) -> Result<Self> {
        let d = probs.len();
        let states = (0..d).map(|k| ClassicalState::point_mass(d, k)).collect::<Result<Vec<_>>>()?;
        Self::new(states, probs)
    }

    pub fn states(&self) -> &[ClassicalState] {
        &self.states
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// The average emitted state.
    pub fn mixed_state(&self) -> &ClassicalState {
        &self.mixed
    }

    pub fn alphabet_size(&self) -> usize {
        self.mixed.alphabet_size()
    }

    pub fn entropy(&self) -> f64 {
        self.mixed.shannon_entropy()
    }
}

/// Rate, typicality window and weak-disturbance constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodingConfig {
    pub rate: f64,
    pub eps: f64,
    /// Target atypical mass.
    pub delta: f64,
    /// Weak-disturbance prefactor `c` in `h_T D(S, T[S]) <= c h_A^eps_wd`.
    pub c: f64,
    pub eps_wd: f64,
}

impl CodingConfig {
    /// Restrict-and-renormalize on classical states disturbs by exactly the
    /// excluded mass.
    pub const CLASSICAL_WEAK_DISTURBANCE: (f64, f64) = (1.0, 1.0);

    /// Constants for projective measurements on quantum states.
    pub const QUANTUM_WEAK_DISTURBANCE: (f64, f64) = ((2.828_427_124_746_190_1 + 1.0) / 2.0, 0.5);

    pub fn classical(rate: f64, eps: f64, delta: f64) -> Result<Self> {
        let (c, eps_wd) = Self::CLASSICAL_WEAK_DISTURBANCE;
        let cfg = Self { rate, eps, delta, c, eps_wd };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.eps > 0.0 && self.delta > 0.0) {
            return Err(Error::OutOfRange("rate, eps and delta must be positive".into()));
        }
        if !(self.c >= 0.0 && self.eps_wd > 0.0 && self.eps_wd <= 1.0) {
            return Err(Error::OutOfRange("need c >= 0 and eps_wd in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Letters merged by equal probability: `(probability, multiplicity)`.
/// Zero-probability letters are dropped.
pub(crate) fn probability_groups(probs: &[Rational]) -> Vec<(Rational, usize)> {
    let mut groups: Vec<(Rational, usize)> = Vec::new();
    for p in probs.iter().filter(|p| !p.is_zero()) {
        match groups.iter_mut().find(|(q, _)| q == p) {
            Some(g) => g.1 += 1,
            None => groups.push((p.clone(), 1)),
        }
    }
    groups
}

/// Number of compositions of `n` into `parts` nonnegative parts.
pub(crate) fn composition_count(n: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(n == 0);
    }
    let k = parts - 1;
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n + k - i) as u128) / (i as u128 + 1))
}

/// Calls `f` on every composition of `n` into `parts` parts, in
/// lexicographic order of the count vector.
pub(crate) fn for_each_composition(n: usize, parts: usize, mut f: impl FnMut(&[usize])) {
    fn rec(rest: usize, slot: usize, counts: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if slot + 1 == counts.len() {
            counts[slot] = rest;
            f(counts);
            return;
        }
        for c in 0..=rest {
            counts[slot] = c;
            rec(rest - c, slot + 1, counts, f);
        }
    }
    if parts == 0 {
        if n == 0 {
            f(&[]);
        }
        return;
    }
    let mut counts = vec![0; parts];
    rec(n, 0, &mut counts, &mut f);
}

/// `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(0.0);
    for k in 1..=n {
        t.push(t[k - 1] + (k as f64).ln());
    }
    t
}

/// `ln(exp(a) + exp(b))`.
pub(crate) fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("sequence length must be positive".into()));
    }
    if n > MAX_N {
        return Err(Error::guard("sequence length", n as u128, MAX_N as u128));
    }
    Ok(())
}
