use rand::distributions::{Distribution, WeightedIndex};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::typical::{is_typical, typical_mass_and_count};
use super::{check_n, composition_count, for_each_composition, CodingConfig, Source, MAX_TYPES};
use crate::error::{Error, Result};
use crate::rational;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionReport {
    pub n: usize,
    pub rate: f64,
    pub eps: f64,
    pub entropy_bits: f64,
    /// The rate is below the source entropy; no guarantee applies.
    pub rate_below_entropy: bool,
    /// Average distance between emitted and decoded states, which equals
    /// the atypical mass of the source.
    pub exact_avg_distance: f64,
    /// `(c + 1) delta^eps_wd` at `delta` equal to the atypical mass.
    pub distance_bound: f64,
    pub within_distance_bound: bool,
    pub within_delta: bool,
    pub trials: usize,
    pub seed: u64,
    pub mc_avg_distance: f64,
    pub mc_std_error: f64,
    /// `log2` of the number of typical sequences, the dimension of the
    /// subspace the encoder outputs into.
    pub log2_dimension: f64,
    pub dimension_bound_log2: f64,
    pub dimension_within_rate: bool,
    /// Letter counts of the fixed state output on atypical outcomes; the
    /// sequence is these letters in increasing order.
    pub fail_counts: Vec<usize>,
}

/// Letter counts of the lexicographically first typical sequence. The
/// first sequence with given counts is the sorted one, so this is the
/// typical count vector that is largest in lexicographic order.
pub fn failure_sequence(source: &Source, n: usize, eps: f64) -> Result<Vec<usize>> {
    check_n(n)?;
    let probs = source.mixed_state().probs();
    let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > rational::zero()).collect();
    let types = composition_count(n, support.len());
    if types > MAX_TYPES {
        return Err(Error::guard("type classes", types, MAX_TYPES));
    }
    let log2_p: Vec<f64> = support.iter().map(|&i| rational::log2(&probs[i])).collect();
    let entropy = source.entropy();
    let mut best: Option<Vec<usize>> = None;
    for_each_composition(n, support.len(), |c| {
        let log2_prob: f64 = c.iter().zip(&log2_p).map(|(&k, l)| k as f64 * l).sum();
        if is_typical(log2_prob, n, entropy, eps) && best.as_deref().map_or(true, |b| c > b) {
            best = Some(c.to_vec());
        }
    });
    let best = best.ok_or(Error::Infeasible)?;
    let mut counts = vec![0; probs.len()];
    for (&i, k) in support.iter().zip(best) {
        counts[i] = k;
    }
    Ok(counts)
}

/// Runs the typical-subspace compression scheme on `n` emissions of
/// `source`. Each Monte-Carlo trial draws emitted states, then an outcome
/// sequence from them; the outcome is atypical with probability equal to
/// the distance between that emission and its decoding.
pub fn simulate_compression(
    source: &Source,
    n: usize,
    config: &CodingConfig,
    trials: usize,
    seed: u64,
) -> Result<CompressionReport> {
    config.validate()?;
    let typical = typical_mass_and_count(source, n, config.eps)?;
    let fail_counts = failure_sequence(source, n, config.eps)?;
    let entropy = source.entropy();
    let delta = typical.atypical_mass.max(0.0);

    let weights: Vec<f64> = source.weights().iter().map(rational::to_f64).collect();
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::InvalidState(e.to_string()))?;
    let letters: Vec<WeightedIndex<f64>> = source
        .states()
        .iter()
        .map(|s| WeightedIndex::new(s.probs_f64()).map_err(|e| Error::InvalidState(e.to_string())))
        .collect::<Result<_>>()?;
    let log2_mixed: Vec<f64> = source
        .mixed_state()
        .probs()
        .iter()
        .map(|p| if p > &rational::zero() { rational::log2(p) } else { f64::NEG_INFINITY })
        .collect();
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let trial_seeds: Vec<u64> = (0..trials).map(|_| master.next_u64()).collect();
    let outcomes: Vec<f64> = trial_seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut log2_prob = 0.0;
            for _ in 0..n {
                let k = pick.sample(&mut rng);
                log2_prob += log2_mixed[letters[k].sample(&mut rng)];
            }
            if is_typical(log2_prob, n, entropy, config.eps) {
                0.0
            } else {
                1.0
            }
        })
        .collect();
    let (mc_avg, mc_err) = if trials == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let mean = outcomes.iter().sum::<f64>() / trials as f64;
        (mean, (mean * (1.0 - mean) / trials as f64).sqrt())
    };
    let distance_bound = (config.c + 1.0) * delta.powf(config.eps_wd);
    let dimension_bound_log2 = n as f64 * config.rate;
    Ok(CompressionReport {
        n,
        rate: config.rate,
        eps: config.eps,
        entropy_bits: entropy,
        rate_below_entropy: config.rate < entropy,
        exact_avg_distance: delta,
        distance_bound,
        within_distance_bound: delta <= distance_bound + 1e-15,
        within_delta: delta <= config.delta,
        trials,
        seed,
        mc_avg_distance: mc_avg,
        mc_std_error: mc_err,
        log2_dimension: typical.log2_count,
        dimension_bound_log2,
        dimension_within_rate: typical.log2_count <= dimension_bound_log2,
        fail_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ClassicalState;
    use crate::rational::ratio;

    #[test]
    fn deterministic_source_is_lossless() {
        let src = Source::letters(vec![ratio(1, 1), ratio(0, 1)]).unwrap();
        let cfg = CodingConfig::classical(0.01, 0.001, 0.01).unwrap();
        let r = simulate_compression(&src, 50, &cfg, 20, 1).unwrap();
        assert_eq!(r.exact_avg_distance, 0.0);
        assert_eq!(r.mc_avg_distance, 0.0);
        assert_eq!(r.log2_dimension, 0.0);
        assert_eq!(r.fail_counts, vec![50, 0]);
    }

    #[test]
    fn same_seed_same_report() {
        let src = Source::letters(vec![ratio(9, 10), ratio(1, 10)]).unwrap();
        let cfg = CodingConfig::classical(0.6, 0.05, 0.05).unwrap();
        let a = simulate_compression(&src, 200, &cfg, 200, 7).unwrap();
        let b = simulate_compression(&src, 200, &cfg, 200, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.mc_avg_distance - a.exact_avg_distance).abs() < 5.0 * a.mc_std_error.max(0.01));
    }

    /// Mixed emissions: the outcome statistics only depend on the average
    /// state, so the exact distance matches the letter source.
    #[test]
    fn mixed_emissions_match_letter_source() {
        let a = ClassicalState::from_probs(vec![ratio(4, 5), ratio(1, 5)]).unwrap();
        let b = ClassicalState::point_mass(2, 0).unwrap();
        let mixed = Source::new(vec![a, b], vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let letters = Source::letters(vec![ratio(9, 10), ratio(1, 10)]).unwrap();
        let cfg = CodingConfig::classical(0.6, 0.05, 0.05).unwrap();
        let x = simulate_compression(&mixed, 100, &cfg, 0, 0).unwrap();
        let y = simulate_compression(&letters, 100, &cfg, 0, 0).unwrap();
        assert_eq!(x.exact_avg_distance, y.exact_avg_distance);
    }

    #[test]
    fn failure_sequence_is_typical_and_first() {
        let src = Source::letters(vec![ratio(9, 10), ratio(1, 10)]).unwrap();
        let c = failure_sequence(&src, 100, 0.05).unwrap();
        let h = src.entropy();
        let typical = |k: usize| is_typical((100 - k) as f64 * 0.9f64.log2() + k as f64 * 0.1f64.log2(), 100, h, 0.05);
        assert!(typical(c[1]));
        assert!((0..c[1]).all(|k| !typical(k)));
    }
}
