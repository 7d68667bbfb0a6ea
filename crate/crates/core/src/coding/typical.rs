use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use super::{
    check_n, composition_count, for_each_composition, ln_add, ln_factorials, probability_groups, Source, EXACT_MAX_N,
    MAX_TYPES, TYPICALITY_SLACK,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Cap on type classes for the exact-arithmetic path.
const EXACT_MAX_TYPES: u128 = 100_000;

fn serialize_count<S: serde::Serializer>(c: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match c {
        Some(c) => s.serialize_str(&c.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalReport {
    pub n: usize,
    pub eps: f64,
    pub entropy_bits: f64,
    pub types: u128,
    pub typical_types: u128,
    /// Probability that a sequence drawn from the source is typical.
    pub mass: f64,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub mass_exact: Option<Rational>,
    pub atypical_mass: f64,
    /// Number of typical sequences.
    #[serde(serialize_with = "serialize_count")]
    pub count: Option<BigUint>,
    pub log2_count: f64,
    /// `log2(1 - delta) + n (H - eps)` with `delta` the atypical mass.
    pub lower_bound_log2: f64,
    /// `n (H + eps)`.
    pub upper_bound_log2: f64,
    pub lower_bound_holds: bool,
    pub upper_bound_holds: bool,
}

/// A sequence whose probability is `2^log2_prob` is typical when its
/// per-letter surprisal is within `eps` of the entropy.
pub(crate) fn is_typical(log2_prob: f64, n: usize, entropy: f64, eps: f64) -> bool {
    (-log2_prob / n as f64 - entropy).abs() <= eps + TYPICALITY_SLACK
}

/// Typical set of `source` at length `n` and window `eps`: its probability
/// and its size, with the size bounds evaluated.
pub fn typical_mass_and_count(source: &Source, n: usize, eps: f64) -> Result<TypicalReport> {
    check_n(n)?;
    if !(eps > 0.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} must be positive")));
    }
    let probs = source.mixed_state().probs();
    let groups = probability_groups(probs);
    let types = composition_count(n, groups.len());
    if types > MAX_TYPES {
        return Err(Error::guard("type classes", types, MAX_TYPES));
    }
    let entropy = source.entropy();
    let log2_p: Vec<f64> = groups.iter().map(|(p, _)| rational::log2(p)).collect();
    let ln_mult: Vec<f64> = groups.iter().map(|(_, m)| (*m as f64).ln()).collect();
    let ln_fact = ln_factorials(n);
    let exact = n <= EXACT_MAX_N && types <= EXACT_MAX_TYPES;
    let factorials: Vec<BigUint> = if exact {
        let mut f = vec![BigUint::one()];
        for k in 1..=n {
            let next = &f[k - 1] * BigUint::from(k);
            f.push(next);
        }
        f
    } else {
        Vec::new()
    };

    let mut typical_types = 0u128;
    let mut ln_mass = f64::NEG_INFINITY;
    let mut ln_count = f64::NEG_INFINITY;
    let mut mass_exact = Rational::zero();
    let mut count_exact = BigUint::zero();
    for_each_composition(n, groups.len(), |c| {
        let log2_prob: f64 = c.iter().zip(&log2_p).map(|(&k, l)| k as f64 * l).sum();
        if !is_typical(log2_prob, n, entropy, eps) {
            return;
        }
        typical_types += 1;
        let ln_sequences = ln_fact[n] - c.iter().map(|&k| ln_fact[k]).sum::<f64>()
            + c.iter().zip(&ln_mult).map(|(&k, l)| k as f64 * l).sum::<f64>();
        ln_count = ln_add(ln_count, ln_sequences);
        ln_mass = ln_add(ln_mass, ln_sequences + log2_prob * std::f64::consts::LN_2);
        if exact {
            let mut sequences = factorials[n].clone();
            for &k in c {
                sequences /= &factorials[k];
            }
            for ((_, m), &k) in groups.iter().zip(c) {
                sequences *= num_traits::pow(BigUint::from(*m), k);
            }
            let mut prob = Rational::one();
            for ((p, _), &k) in groups.iter().zip(c) {
                prob *= num_traits::pow(p.clone(), k);
            }
            mass_exact += prob * Rational::from_integer(BigInt::from(sequences.clone()));
            count_exact += sequences;
        }
    });

    let (mass, log2_count, mass_exact, count) = if exact {
        let log2_count = if count_exact.is_zero() {
            f64::NEG_INFINITY
        } else {
            rational::log2_bigint(&BigInt::from(count_exact.clone()))
        };
        (rational::to_f64(&mass_exact), log2_count, Some(mass_exact), Some(count_exact))
    } else {
        (ln_mass.exp(), ln_count / std::f64::consts::LN_2, None, None)
    };
    let atypical_mass = match &mass_exact {
        Some(m) => rational::to_f64(&(Rational::one() - m)),
        None => 1.0 - mass,
    };
    let nf = n as f64;
    let lower_bound_log2 = (1.0 - atypical_mass).log2() + nf * (entropy - eps);
    let upper_bound_log2 = nf * (entropy + eps);
    Ok(TypicalReport {
        n,
        eps,
        entropy_bits: entropy,
        types,
        typical_types,
        mass,
        mass_exact,
        atypical_mass,
        count,
        log2_count,
        lower_bound_log2,
        upper_bound_log2,
        lower_bound_holds: lower_bound_log2 <= log2_count + TYPICALITY_SLACK,
        upper_bound_holds: log2_count <= upper_bound_log2 + TYPICALITY_SLACK,
    })
}
