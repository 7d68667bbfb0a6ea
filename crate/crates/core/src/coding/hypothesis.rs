use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use super::{check_n, composition_count, for_each_composition, ln_add, ln_factorials, MAX_TYPES};
use crate::classical::ClassicalState;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest `N` for which the optimal error is also computed exactly.
pub const HYPOTHESIS_EXACT_MAX_N: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub n: usize,
    /// Bound on the probability of rejecting the first hypothesis.
    #[serde(serialize_with = "rational::serialize")]
    pub threshold: Rational,
    /// Smallest probability of accepting the first hypothesis when the
    /// second holds.
    pub p_n: f64,
    pub log2_p_n: f64,
    /// `-log2(p_N) / N`; infinite when the states can be told apart.
    pub rate: f64,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub p_n_exact: Option<Rational>,
}

struct TypeClass {
    counts: Vec<usize>,
    ln_sequences: f64,
    ln_m1: f64,
    ln_m2: f64,
}

impl TypeClass {
    fn ln_ratio(&self) -> f64 {
        if self.ln_m2 == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            self.ln_m1 - self.ln_m2
        }
    }
}

/// [`hypothesis_test_pn_with`] at threshold 1/2.
pub fn hypothesis_test_pn(s1: &ClassicalState, s2: &ClassicalState, n: usize) -> Result<HypothesisReport> {
    hypothesis_test_pn_with(s1, s2, n, &rational::ratio(1, 2))
}

/// Optimal error of a test between `n` copies of `s1` and of `s2` that
/// rejects `s1` with probability at most `threshold`. Sequences are
/// accepted in decreasing order of likelihood ratio, with a randomized
/// decision on the boundary type class so the constraint is tight.
pub fn hypothesis_test_pn_with(
    s1: &ClassicalState,
    s2: &ClassicalState,
    n: usize,
    threshold: &Rational,
) -> Result<HypothesisReport> {
    check_n(n)?;
    if s1.dims() != s2.dims() {
        return Err(Error::SystemMismatch(format!("alphabets {:?} vs {:?}", s1.dims(), s2.dims())));
    }
    if threshold <= &Rational::zero() || threshold >= &Rational::one() {
        return Err(Error::OutOfRange(format!("threshold {} must lie in (0, 1)", rational::format(threshold))));
    }
    let mut groups: Vec<(Rational, Rational, usize)> = Vec::new();
    for (p, q) in s1.probs().iter().zip(s2.probs()) {
        if p.is_zero() {
            continue;
        }
        match groups.iter_mut().find(|(a, b, _)| a == p && b == q) {
            Some(g) => g.2 += 1,
            None => groups.push((p.clone(), q.clone(), 1)),
        }
    }
    let types = composition_count(n, groups.len());
    if types > MAX_TYPES {
        return Err(Error::guard("type classes", types, MAX_TYPES));
    }
    let ln = |r: &Rational| if r.is_zero() { f64::NEG_INFINITY } else { rational::log2(r) * std::f64::consts::LN_2 };
    let ln_p: Vec<f64> = groups.iter().map(|g| ln(&g.0)).collect();
    let ln_q: Vec<f64> = groups.iter().map(|g| ln(&g.1)).collect();
    let ln_mult: Vec<f64> = groups.iter().map(|g| (g.2 as f64).ln()).collect();
    let ln_fact = ln_factorials(n);
    let term =
        |c: &[usize], l: &[f64]| -> f64 { c.iter().zip(l).filter(|(&k, _)| k > 0).map(|(&k, &x)| k as f64 * x).sum() };
    let mut classes = Vec::new();
    for_each_composition(n, groups.len(), |c| {
        classes.push(TypeClass {
            counts: c.to_vec(),
            ln_sequences: ln_fact[n] - c.iter().map(|&k| ln_fact[k]).sum::<f64>() + term(c, &ln_mult),
            ln_m1: term(c, &ln_p),
            ln_m2: term(c, &ln_q),
        });
    });
    classes.sort_by(|a, b| b.ln_ratio().total_cmp(&a.ln_ratio()));

    let thr = rational::to_f64(threshold);
    let mut acc1 = 0.0;
    let mut ln_p_n = f64::NEG_INFINITY;
    for t in &classes {
        let m1 = (t.ln_sequences + t.ln_m1).exp();
        let ln_m2 = t.ln_sequences + t.ln_m2;
        if acc1 + m1 >= thr {
            let fraction = (thr - acc1) / m1;
            if fraction > 0.0 {
                ln_p_n = ln_add(ln_p_n, fraction.ln() + ln_m2);
            }
            break;
        }
        acc1 += m1;
        ln_p_n = ln_add(ln_p_n, ln_m2);
    }

    let p_n_exact = (n <= HYPOTHESIS_EXACT_MAX_N).then(|| exact_p_n(&classes, &groups, n, threshold));
    let log2_p_n = match &p_n_exact {
        Some(p) if p.is_zero() => f64::NEG_INFINITY,
        Some(p) => rational::log2(p),
        None => ln_p_n / std::f64::consts::LN_2,
    };
    Ok(HypothesisReport {
        n,
        threshold: threshold.clone(),
        p_n: log2_p_n.exp2(),
        log2_p_n,
        rate: -log2_p_n / n as f64,
        p_n_exact,
    })
}

fn exact_p_n(
    classes: &[TypeClass],
    groups: &[(Rational, Rational, usize)],
    n: usize,
    threshold: &Rational,
) -> Rational {
    let mut fact = vec![BigUint::one()];
    for k in 1..=n {
        let next = &fact[k - 1] * BigUint::from(k);
        fact.push(next);
    }
    let mut acc1 = Rational::zero();
    let mut acc2 = Rational::zero();
    for t in classes {
        let mut sequences = fact[n].clone();
        for &k in &t.counts {
            sequences /= &fact[k];
        }
        let mut m1 = Rational::from_integer(BigInt::from(sequences));
        let mut m2 = m1.clone();
        for ((p, q, m), &k) in groups.iter().zip(&t.counts) {
            let mk = Rational::from_integer(BigInt::from(num_traits::pow(BigUint::from(*m), k)));
            m1 *= num_traits::pow(p.clone(), k) * &mk;
            m2 *= num_traits::pow(q.clone(), k) * mk;
        }
        if &acc1 + &m1 >= *threshold {
            let fraction = (threshold - &acc1) / m1;
            return acc2 + fraction * m2;
        }
        acc1 += m1;
        acc2 += m2;
    }
    acc2
}

/// Rates `-log2(p_N)/N` for each `N` in `n_list`.
pub fn relative_entropy_estimate(
    s1: &ClassicalState,
    s2: &ClassicalState,
    n_list: &[usize],
) -> Result<Vec<HypothesisReport>> {
    n_list.iter().map(|&n| hypothesis_test_pn(s1, s2, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info;
    use crate::rational::ratio;

    fn bern(p: Rational) -> ClassicalState {
        ClassicalState::from_probs(vec![rational::one() - &p, p]).unwrap()
    }

    #[test]
    fn identical_states_give_one_half() {
        let s = bern(ratio(1, 3));
        for n in [1, 5, 40] {
            let r = hypothesis_test_pn(&s, &s, n).unwrap();
            assert_eq!(r.p_n_exact, Some(ratio(1, 2)));
            assert!((r.p_n - 0.5).abs() < 1e-12);
        }
    }

    /// The accept region is the single sequence of the point mass, taken
    /// with probability 1/2 to meet the constraint with equality.
    #[test]
    fn point_mass_versus_uniform() {
        let s1 = ClassicalState::point_mass(2, 0).unwrap();
        let s2 = ClassicalState::uniform(2);
        for n in [1, 10, 100] {
            let r = hypothesis_test_pn(&s1, &s2, n).unwrap();
            assert_eq!(r.p_n_exact, Some(Rational::new(1.into(), BigInt::from(2).pow(n as u32 + 1))));
            assert!((r.log2_p_n + (n as f64 + 1.0)).abs() < 1e-9);
        }
    }

    /// Brute force over all tests that accept a set of sequences plus a
    /// fraction of one more, for N = 3 (8 sequences).
    #[test]
    fn matches_sequence_level_optimum() {
        let (p, q) = (ratio(1, 2), ratio(1, 4));
        let s1 = bern(p.clone());
        let s2 = bern(q.clone());
        let n = 3;
        let prob = |x: &Rational, seq: u32| {
            let ones = seq.count_ones() as usize;
            num_traits::pow(x.clone(), ones) * num_traits::pow(rational::one() - x, n - ones)
        };
        let mut best: Option<Rational> = None;
        for set in 0u32..(1 << 8) {
            let in1: Rational =
                (0..8).filter(|s| set >> s & 1 == 1).map(|s| prob(&p, s)).fold(Rational::zero(), |a, b| a + b);
            let in2: Rational =
                (0..8).filter(|s| set >> s & 1 == 1).map(|s| prob(&q, s)).fold(Rational::zero(), |a, b| a + b);
            for extra in (0..8).filter(|s| set >> s & 1 == 0) {
                let need = ratio(1, 2) - &in1;
                let m1 = prob(&p, extra);
                if need >= Rational::zero() && need <= m1 {
                    let v = &in2 + need / m1 * prob(&q, extra);
                    if best.as_ref().map_or(true, |b| &v < b) {
                        best = Some(v);
                    }
                }
            }
        }
        let r = hypothesis_test_pn(&s1, &s2, n).unwrap();
        assert_eq!(r.p_n_exact, best);
    }

    #[test]
    fn exact_and_log_domain_agree() {
        let r = hypothesis_test_pn(&bern(ratio(1, 2)), &bern(ratio(1, 4)), 200).unwrap();
        let exact = rational::log2(r.p_n_exact.as_ref().unwrap());
        let r2 = hypothesis_test_pn(&bern(ratio(1, 2)), &bern(ratio(1, 4)), 301).unwrap();
        assert!(r2.p_n_exact.is_none());
        assert!((r.log2_p_n - exact).abs() < 1e-12);
        assert!(r2.rate > 0.0);
    }

    #[test]
    fn rate_approaches_relative_entropy() {
        let s1 = bern(ratio(1, 2));
        let s2 = bern(ratio(1, 4));
        let kl = info::kl_divergence(&s1.probs_f64(), &s2.probs_f64());
        let rates: Vec<f64> =
            relative_entropy_estimate(&s1, &s2, &[100, 1000, 5000]).unwrap().iter().map(|r| r.rate).collect();
        assert!((rates[2] - kl).abs() < 0.02, "{rates:?} vs {kl}");
        assert!((rates[0] - kl).abs() > (rates[2] - kl).abs());
    }
}
