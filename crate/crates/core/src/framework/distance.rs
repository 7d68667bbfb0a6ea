use num_traits::Zero;

use super::State;
use crate::boxworld::{enumerate_adaptive_strategies, BoxState, StrategyOptions};
use crate::entropy::Limits;
use crate::error::{Error, Result};
use crate::info;
use crate::quantum;
use crate::rational::{self, Rational};

/// Operational distance with the default strategy guard.
pub fn distance(s0: &State, s1: &State) -> Result<f64> {
    distance_with_limit(s0, s1, Limits::default().max_strategies)
}

/// Largest total-variation distance between the outcome distributions of
/// any fine-grained measurement. Classical: the fiducial measurement.
/// Quantum: the trace distance. Box world: every adaptive strategy.
pub fn distance_with_limit(s0: &State, s1: &State, max_strategies: u128) -> Result<f64> {
    match (s0, s1) {
        (State::Classical(a), State::Classical(b)) => {
            if a.dims() != b.dims() {
                return Err(Error::SystemMismatch(format!("alphabets {:?} vs {:?}", a.dims(), b.dims())));
            }
            Ok(rational::to_f64(&info::total_variation_exact(a.probs(), b.probs())))
        }
        (State::Quantum(a), State::Quantum(b)) => quantum::trace_distance(a, b),
        (State::Box(a), State::Box(b)) => Ok(rational::to_f64(&box_distance_exact(a, b, max_strategies)?.0)),
        _ => Err(Error::SystemMismatch(format!("{} state vs {} state", s0.theory(), s1.theory()))),
    }
}

/// Exact box-world distance and the index of the first maximizing strategy.
pub fn box_distance_exact(a: &BoxState, b: &BoxState, max_strategies: u128) -> Result<(Rational, usize)> {
    if a.signature() != b.signature() {
        return Err(Error::SystemMismatch(format!("{} vs {}", a.signature(), b.signature())));
    }
    let strategies = enumerate_adaptive_strategies(a.signature(), StrategyOptions::default(), max_strategies)?;
    let mut best = (Rational::zero(), 0);
    for (k, s) in strategies.iter().enumerate() {
        let tv = info::total_variation_exact(&s.apply(a)?, &s.apply(b)?);
        if tv > best.0 {
            best = (tv, k);
        }
    }
    Ok(best)
}
