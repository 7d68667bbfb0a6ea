#![allow(dead_code)]

use gpt_entropy::boxworld::{enumerate_pure_states, BoxSpec, BoxState, Signature};
use gpt_entropy::classical::ClassicalState;
use gpt_entropy::rational::{self, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sig(boxes: &[(usize, usize)]) -> Signature {
    Signature::new(boxes.iter().map(|&(i, o)| BoxSpec::new(i, o)).collect()).unwrap()
}

pub fn vertices(boxes: &[(usize, usize)]) -> Vec<BoxState> {
    enumerate_pure_states(&sig(boxes), 1_000_000).unwrap().vertices
}

/// Integer weights in `0..=9` on up to four random pool members, with at
/// least one positive weight, normalized exactly.
pub fn random_mixture(pool: &[BoxState], rng: &mut impl Rng) -> BoxState {
    let k = rng.gen_range(1..=4);
    let picks: Vec<(usize, i64)> = (0..k).map(|_| (rng.gen_range(0..pool.len()), rng.gen_range(1..=9))).collect();
    let total: i64 = picks.iter().map(|p| p.1).sum();
    let mut table = vec![rational::zero(); pool[0].table().len()];
    for (i, w) in picks {
        let w = rational::ratio(w, total);
        for (t, p) in table.iter_mut().zip(pool[i].table()) {
            *t += &w * p;
        }
    }
    BoxState::new(pool[0].signature().clone(), table).unwrap()
}

pub fn random_distribution(d: usize, rng: &mut impl Rng) -> Vec<Rational> {
    let mut w: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=20)).collect();
    if w.iter().all(|&x| x == 0) {
        w[rng.gen_range(0..d)] = 1;
    }
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| rational::ratio(x, total)).collect()
}

pub fn random_classical(dims: Vec<usize>, rng: &mut impl Rng) -> ClassicalState {
    let d = dims.iter().product();
    ClassicalState::new(dims, random_distribution(d, rng)).unwrap()
}

/// Shannon entropy in bits, written out independently of the library.
pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}
