use num_traits::{One, Zero};
use serde::Serialize;

use super::conditional::branches;
use super::{Engine, Partition, ZERO_TOLERANCE};
use crate::error::{Error, Result};
use crate::framework::State;

/// How a conditional-entropy function behaves on one instance with a
/// classical first part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReasonablenessReport {
    /// Some measurement on B reveals A with certainty.
    pub determinable: bool,
    pub value: f64,
    /// Zero whenever A is determinable.
    pub satisfies_1: bool,
    /// Positive whenever A is not determinable.
    pub satisfies_2: bool,
    /// Nonzero whenever A is not determinable.
    pub satisfies_2_prime: bool,
    pub reasonable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsaReport {
    pub h_abc: f64,
    pub h_c: f64,
    pub h_ac: f64,
    pub h_bc: f64,
    /// `H(ABC) + H(C)`.
    pub lhs: f64,
    /// `H(AC) + H(BC)`.
    pub rhs: f64,
    pub violated: bool,
}

impl Engine {
    /// True if some fine-grained strategy on B leaves A a point mass on
    /// every branch that occurs. A must be classical.
    pub fn determinable(&self, state: &State, partition: &Partition) -> Result<bool> {
        partition.validate(state.num_subsystems())?;
        let Some(whole) = state.to_box() else {
            return Err(Error::Unsupported("determinability on a quantum system".into()));
        };
        let ab: Vec<usize> = partition.a.iter().chain(&partition.b).copied().collect();
        let joint = whole.marginal(&ab)?;
        let na = partition.a.len();
        if joint.signature().boxes()[..na].iter().any(|b| !b.is_classical()) {
            return Err(Error::Unsupported("the determined system must be classical".into()));
        }
        let point_mass = |t: &[crate::rational::Rational]| t.iter().filter(|p| !p.is_zero()).count() == 1;
        let a_pos: Vec<usize> = (0..na).collect();
        if point_mass(joint.marginal(&a_pos)?.table()) {
            return Ok(true);
        }
        let b_pos: Vec<usize> = (na..ab.len()).collect();
        if b_pos.is_empty() {
            return Ok(false);
        }
        let b_sig = joint.signature().select(&b_pos);
        for strategy in self.strategies(&b_sig)? {
            let all = branches(&joint, &b_pos, &strategy)?;
            if all.iter().all(|(_, _, s)| s.table().iter().any(|p| p.is_one())) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Checks conditions {1}, {2} and {2'} for `entropy_fn` on one instance.
    pub fn check_reasonableness<F>(
        &self,
        entropy_fn: F,
        state: &State,
        partition: &Partition,
    ) -> Result<ReasonablenessReport>
    where
        F: Fn(&State, &Partition) -> Result<f64>,
    {
        let determinable = self.determinable(state, partition)?;
        let value = entropy_fn(state, partition)?;
        let zero = value.abs() <= ZERO_TOLERANCE;
        let satisfies_1 = !determinable || zero;
        let satisfies_2 = determinable || value > ZERO_TOLERANCE;
        let satisfies_2_prime = determinable || !zero;
        Ok(ReasonablenessReport {
            determinable,
            value,
            satisfies_1,
            satisfies_2,
            satisfies_2_prime,
            reasonable: satisfies_1 && satisfies_2,
        })
    }

    /// Both sides of strong subadditivity for subsystems `a`, `b`, `c`.
    pub fn check_strong_subadditivity(
        &self,
        state: &State,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<SsaReport> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::OutOfRange("strong subadditivity needs non-empty A and B".into()));
        }
        let abc: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
        Partition::new(abc.clone(), vec![]).validate(state.num_subsystems())?;
        let h = |s: &[usize]| -> Result<f64> {
            if s.is_empty() {
                Ok(0.0)
            } else {
                Ok(self.hhat_of(state, s)?.value_bits)
            }
        };
        let ac: Vec<usize> = a.iter().chain(c).copied().collect();
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        let (h_abc, h_c, h_ac, h_bc) = (h(&abc)?, h(c)?, h(&ac)?, h(&bc)?);
        let (lhs, rhs) = (h_abc + h_c, h_ac + h_bc);
        Ok(SsaReport { h_abc, h_c, h_ac, h_bc, lhs, rhs, violated: lhs > rhs + ZERO_TOLERANCE })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxworld::pr_box;
    use crate::classical::ClassicalState;
    use crate::rational::ratio;

    #[test]
    fn correlated_bits_are_determinable() {
        let s = ClassicalState::new(vec![2, 2], vec![ratio(1, 2), ratio(0, 1), ratio(0, 1), ratio(1, 2)]).unwrap();
        let s = State::Classical(s);
        let e = Engine::default();
        let p = Partition::new(vec![0], vec![1]);
        assert!(e.determinable(&s, &p).unwrap());
        let r = e.check_reasonableness(|s, p| Ok(e.cond_plus(s, p)?.value_bits), &s, &p).unwrap();
        assert!(r.reasonable);
    }

    #[test]
    fn independent_bit_is_not_determinable() {
        let s = State::Classical(ClassicalState::uniform(2).tensor(&ClassicalState::uniform(2)));
        let e = Engine::default();
        let p = Partition::new(vec![0], vec![1]);
        assert!(!e.determinable(&s, &p).unwrap());
        let r = e.check_reasonableness(|_, _| Ok(0.0), &s, &p).unwrap();
        assert!(r.satisfies_1 && !r.satisfies_2 && !r.satisfies_2_prime && !r.reasonable);
        let r = e.check_reasonableness(|_, _| Ok(-1.0), &s, &p).unwrap();
        assert!(!r.satisfies_2 && r.satisfies_2_prime);
    }

    #[test]
    fn non_classical_first_part_is_rejected() {
        let e = Engine::default();
        let p = Partition::new(vec![0], vec![1]);
        assert!(matches!(e.determinable(&State::Box(pr_box()), &p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn classical_states_satisfy_ssa() {
        let probs = (1..=8).map(|n| ratio(n, 36)).collect();
        let s = State::Classical(ClassicalState::new(vec![2, 2, 2], probs).unwrap());
        let r = Engine::default().check_strong_subadditivity(&s, &[0], &[1], &[2]).unwrap();
        assert!(!r.violated);
        assert!(r.lhs <= r.rhs + 1e-12);
    }
}
