use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::typical::typical_mass_and_count;
use super::Source;
use crate::boxworld::{enumerate_adaptive_strategies, enumerate_pure_states, BoxState, StrategyOptions};
use crate::entropy::Limits;
use crate::error::{Error, Result};
use crate::framework::{Effect, State};
use crate::quantum::{hermitian_eigenvalues, CMatrix, TOLERANCE};
use crate::rational::Rational;

/// A set of states whose dimension can be computed.
#[derive(Debug, Clone)]
pub enum StateSet {
    /// All states on which a full effect evaluates to one.
    Subspace(Effect),
    States(Vec<State>),
    /// States supported on the typical sequences of a source.
    Typical {
        source: Source,
        n: usize,
        eps: f64,
    },
}

/// The subspace of `f`. Errors if no state gives `f` the value one.
pub fn subspace_of(f: &Effect) -> Result<StateSet> {
    let full = match f {
        Effect::Classical(q) => q.iter().any(One::is_one),
        Effect::Quantum(e) => hermitian_eigenvalues(e).iter().any(|&v| (v - 1.0).abs() < TOLERANCE),
        Effect::Box { signature, coefficients } => {
            let vertices = enumerate_pure_states(signature, Limits::default().max_vertex_candidates)?;
            vertices.vertices.iter().any(|v| box_value(coefficients, v).is_one())
        }
    };
    if !full {
        return Err(Error::InvalidMeasurement("effect never takes the value one; its subspace is empty".into()));
    }
    Ok(StateSet::Subspace(f.clone()))
}

fn box_value(coefficients: &[Rational], state: &BoxState) -> Rational {
    coefficients.iter().zip(state.table()).map(|(c, p)| c * p).sum()
}

fn rank(m: &CMatrix) -> usize {
    hermitian_eigenvalues(m).iter().filter(|&&v| v > TOLERANCE).count()
}

/// Fewest outcomes that a fine-grained measurement needs to cover every
/// state of the set.
pub fn dimension_of(set: &StateSet) -> Result<BigUint> {
    let limits = Limits::default();
    match set {
        StateSet::Subspace(Effect::Classical(q)) => Ok(BigUint::from(q.iter().filter(|c| c.is_one()).count())),
        StateSet::Subspace(Effect::Quantum(e)) => {
            Ok(BigUint::from(hermitian_eigenvalues(e).iter().filter(|&&v| (v - 1.0).abs() < TOLERANCE).count()))
        }
        StateSet::Subspace(Effect::Box { signature, coefficients }) => {
            let vertices = enumerate_pure_states(signature, limits.max_vertex_candidates)?;
            let face: Vec<BoxState> =
                vertices.vertices.into_iter().filter(|v| box_value(coefficients, v).is_one()).collect();
            box_dimension(&face, limits.max_strategies)
        }
        StateSet::States(states) => {
            let first = states.first().ok_or_else(|| Error::InvalidState("empty set of states".into()))?;
            let system = first.system();
            if states.iter().any(|s| s.system() != system) {
                return Err(Error::SystemMismatch("states of a set must share one system".into()));
            }
            match first {
                State::Classical(_) => {
                    let mut used = vec![false; first.to_box().expect("classical").table().len()];
                    for s in states {
                        for (u, p) in used.iter_mut().zip(s.to_box().expect("classical").table()) {
                            *u |= !p.is_zero();
                        }
                    }
                    Ok(BigUint::from(used.iter().filter(|&&u| u).count()))
                }
                State::Quantum(_) => {
                    let sum = states
                        .iter()
                        .map(|s| match s {
                            State::Quantum(rho) => rho.matrix().clone(),
                            _ => unreachable!("systems checked"),
                        })
                        .reduce(|a, b| a + b)
                        .expect("non-empty");
                    Ok(BigUint::from(rank(&sum)))
                }
                State::Box(_) => {
                    let boxes: Vec<BoxState> = states.iter().map(|s| s.to_box().expect("box")).collect();
                    box_dimension(&boxes, limits.max_strategies)
                }
            }
        }
        StateSet::Typical { source, n, eps } => typical_mass_and_count(source, *n, *eps)?
            .count
            .ok_or_else(|| Error::guard("exact typical count length", *n as u128, super::EXACT_MAX_N as u128)),
    }
}

fn box_dimension(states: &[BoxState], max_strategies: u128) -> Result<BigUint> {
    let sig = states.first().ok_or_else(|| Error::InvalidState("empty set of states".into()))?.signature();
    let strategies = enumerate_adaptive_strategies(sig, StrategyOptions::default(), max_strategies)?;
    let mut best = usize::MAX;
    for s in &strategies {
        let mut used = vec![false; sig.output_count()];
        for st in states {
            for (u, p) in used.iter_mut().zip(s.apply(st)?) {
                *u |= !p.is_zero();
            }
        }
        best = best.min(used.iter().filter(|&&u| u).count());
    }
    Ok(BigUint::from(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxworld::pr_box;
    use crate::classical::ClassicalState;
    use crate::quantum::DensityMatrix;
    use crate::rational::{int, ratio};
    use num_complex::Complex64;

    #[test]
    fn full_simplex_has_alphabet_size() {
        let set = subspace_of(&Effect::Classical(vec![int(1); 5])).unwrap();
        assert_eq!(dimension_of(&set).unwrap(), BigUint::from(5u32));
    }

    #[test]
    fn fine_grained_full_effect_has_dimension_one() {
        let set = subspace_of(&Effect::Classical(vec![int(0), int(1), int(0)])).unwrap();
        assert_eq!(dimension_of(&set).unwrap(), BigUint::one());
        let mut e = CMatrix::zeros(2, 2);
        e[(0, 0)] = Complex64::new(1.0, 0.0);
        assert_eq!(dimension_of(&subspace_of(&Effect::Quantum(e)).unwrap()).unwrap(), BigUint::one());
    }

    #[test]
    fn non_full_effect_is_rejected() {
        assert!(subspace_of(&Effect::Classical(vec![ratio(1, 2), ratio(1, 2)])).is_err());
    }

    #[test]
    fn explicit_sets() {
        let a = State::Classical(ClassicalState::from_probs(vec![ratio(1, 2), ratio(1, 2), ratio(0, 1)]).unwrap());
        let b = State::Classical(ClassicalState::point_mass(3, 0).unwrap());
        assert_eq!(dimension_of(&StateSet::States(vec![a.clone(), b])).unwrap(), BigUint::from(2u32));
        // log d bounds the entropy of every member.
        let e = crate::entropy::Engine::default();
        assert!(e.hhat(&a).unwrap().value_bits <= 1.0 + 1e-12);
        // Every strategy on the PR box can output all four outcome pairs
        // except two, giving two.
        assert_eq!(dimension_of(&StateSet::States(vec![State::Box(pr_box())])).unwrap(), BigUint::from(2u32));
        let rho = State::Quantum(DensityMatrix::maximally_mixed(3));
        assert_eq!(dimension_of(&StateSet::States(vec![rho])).unwrap(), BigUint::from(3u32));
        assert!(dimension_of(&StateSet::States(vec![a, State::Box(pr_box())])).is_err());
    }

    #[test]
    fn box_face_of_a_deterministic_effect() {
        // Effect "first box outputs 0 on input 0": its face is the states
        // with that output fixed, which the strategy measuring box 0 first
        // can cover with two outcomes.
        let pr = pr_box();
        let sig = pr.signature().clone();
        let mut coeffs = vec![Rational::zero(); sig.table_len()];
        for o in 0..4 {
            if o >> 1 == 0 {
                coeffs[o] = int(1);
            }
        }
        let set = subspace_of(&Effect::Box { signature: sig, coefficients: coeffs }).unwrap();
        assert_eq!(dimension_of(&set).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn typical_dimension_is_the_typical_count() {
        let src = Source::letters(vec![ratio(9, 10), ratio(1, 10)]).unwrap();
        let d = dimension_of(&StateSet::Typical { source: src, n: 200, eps: 0.05 }).unwrap();
        let typical =
            typical_mass_and_count(&Source::letters(vec![ratio(9, 10), ratio(1, 10)]).unwrap(), 200, 0.05).unwrap();
        assert_eq!(Some(d), typical.count);
    }
}
