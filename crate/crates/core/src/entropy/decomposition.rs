use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{Engine, EntropyReport, Witness};
use crate::boxworld::{enumerate_pure_states, BoxState, VertexSet};
use crate::error::{Error, Result};
use crate::framework::State;
use crate::info;
use crate::linalg;
use crate::quantum;
use crate::rational::{self, Rational};

/// A convex decomposition into pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Positive weights, summing to one.
    pub weights: Vec<Rational>,
    /// Indices into the vertex set the decomposition was taken from.
    pub vertices: Vec<usize>,
}

impl Decomposition {
    pub fn entropy(&self) -> f64 {
        info::shannon_exact(&self.weights)
    }
}

/// Tolerance of the floating-point search; every hit is re-solved exactly.
const SEARCH_TOLERANCE: f64 = 1e-9;

/// Entropies closer than this count as ties.
const TIE_SLACK: f64 = 1e-9;

/// Incremental QR factorization of a set of column vectors.
struct FloatBasis {
    q: Vec<Vec<f64>>,
    /// Column `j` of the upper-triangular factor, entries `0..=j`.
    r: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl FloatBasis {
    fn new() -> Self {
        Self { q: Vec::new(), r: Vec::new() }
    }

    /// Projection coefficients onto the basis and the orthogonal residual,
    /// with one reorthogonalization pass.
    fn project(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut w = v.to_vec();
        let mut coeffs = vec![0.0; self.q.len()];
        for _ in 0..2 {
            for (c, q) in coeffs.iter_mut().zip(&self.q) {
                let d = dot(q, &w);
                *c += d;
                for (x, y) in w.iter_mut().zip(q) {
                    *x -= d * y;
                }
            }
        }
        (coeffs, w)
    }

    fn push(&mut self, v: &[f64]) -> bool {
        let (mut coeffs, w) = self.project(v);
        let norm = dot(&w, &w).sqrt();
        if norm < SEARCH_TOLERANCE {
            return false;
        }
        self.q.push(w.iter().map(|x| x / norm).collect());
        coeffs.push(norm);
        self.r.push(coeffs);
        true
    }

    fn pop(&mut self) {
        self.q.pop();
        self.r.pop();
    }

    /// Coefficients of `t` over the pushed vectors, if it lies in their span.
    fn express(&self, t: &[f64]) -> Option<Vec<f64>> {
        let (c, w) = self.project(t);
        if dot(&w, &w).sqrt() > SEARCH_TOLERANCE {
            return None;
        }
        let k = c.len();
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| self.r[j][i] * x[j]).sum();
            x[i] = (c[i] - s) / self.r[i][i];
        }
        Some(x)
    }
}

struct Search<'a> {
    vectors: &'a [Vec<f64>],
    target: &'a [f64],
    /// Supports (indices into `vectors`) with a nonnegative float solution,
    /// and the Shannon entropy of that solution.
    hits: &'a mut Vec<(Vec<usize>, f64)>,
}

impl Search<'_> {
    /// Depth-first search over linearly independent sets. A set whose span
    /// contains the target is a leaf: its coefficients are unique, and they
    /// stay the same in every superset.
    fn run(&mut self, start: usize, basis: &mut FloatBasis, chosen: &mut Vec<usize>) {
        for i in start..self.vectors.len() {
            if !basis.push(&self.vectors[i]) {
                continue;
            }
            chosen.push(i);
            match basis.express(self.target) {
                Some(x) => {
                    if x.iter().all(|&c| c > -SEARCH_TOLERANCE) {
                        let w: Vec<f64> = x.iter().map(|c| c.max(0.0)).collect();
                        self.hits.push((chosen.clone(), info::shannon(&w)));
                    }
                }
                None => self.run(i + 1, basis, chosen),
            }
            chosen.pop();
            basis.pop();
        }
    }
}

/// Exact weights of `target` over the vertices `support`, if nonnegative.
fn exact_weights(columns: &[&BoxState], target: &[Rational]) -> Option<Vec<Rational>> {
    let rows: Vec<Vec<Rational>> =
        (0..target.len()).map(|r| columns.iter().map(|c| c.table()[r].clone()).collect()).collect();
    let x = linalg::solve(&rows, target)?;
    if x.iter().any(|c| c.is_negative()) {
        return None;
    }
    Some(x)
}

/// Decomposition of `state` into `vertices` with the smallest weight
/// entropy. The search runs in floating point over linearly independent
/// supports; the first support in enumeration order within [`TIE_SLACK`]
/// of the float minimum whose exact weights are nonnegative wins.
pub(crate) fn minimal_decomposition(state: &BoxState, vertices: &VertexSet) -> Option<Decomposition> {
    let target = state.table();
    let candidates: Vec<(usize, &BoxState)> = vertices
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.table().iter().zip(target).all(|(x, t)| !t.is_zero() || x.is_zero()))
        .collect();
    let vectors: Vec<Vec<f64>> = candidates.iter().map(|(_, v)| v.table_f64()).collect();
    let target_f64 = state.table_f64();
    let per_root: Vec<Vec<(Vec<usize>, f64)>> = (0..candidates.len())
        .into_par_iter()
        .map(|i| {
            let mut hits = Vec::new();
            let mut search = Search { vectors: &vectors, target: &target_f64, hits: &mut hits };
            let mut basis = FloatBasis::new();
            basis.push(&vectors[i]);
            let mut chosen = vec![i];
            match basis.express(&target_f64) {
                Some(_) => search.hits.push((chosen, 0.0)),
                None => search.run(i + 1, &mut basis, &mut chosen),
            }
            hits
        })
        .collect();
    let hits: Vec<(Vec<usize>, f64)> = per_root.into_iter().flatten().collect();
    let floor = hits.iter().map(|h| h.1).fold(f64::INFINITY, f64::min);
    hits.into_iter().filter(|h| h.1 <= floor + TIE_SLACK).find_map(|(support, _)| {
        let columns: Vec<&BoxState> = support.iter().map(|&j| candidates[j].1).collect();
        let weights = exact_weights(&columns, target)?;
        let (weights, vertices) =
            weights.into_iter().zip(&support).filter(|(c, _)| !c.is_zero()).map(|(c, &j)| (c, candidates[j].0)).unzip();
        Some(Decomposition { weights, vertices })
    })
}

impl Engine {
    /// Smallest Shannon entropy of the weights of a decomposition into pure
    /// states, with the decomposition and vertex set for box states.
    pub fn decomposition_entropy_box(&self, state: &BoxState) -> Result<(EntropyReport, Decomposition, VertexSet)> {
        self.check_box(state)?;
        let vertices = enumerate_pure_states(state.signature(), self.limits.max_vertex_candidates)?;
        let best = minimal_decomposition(state, &vertices).ok_or(Error::Infeasible)?;
        let entangled = best.vertices.iter().filter(|&&v| !vertices.product[v]).count();
        let report = EntropyReport {
            quantity: "H_decomp".into(),
            value_bits: best.entropy(),
            witness: Witness::Decomposition {
                weights: best.weights.iter().map(rational::format).collect(),
                vertices: best.vertices.clone(),
                entangled,
            },
            exact: true,
        };
        Ok((report, best, vertices))
    }

    /// Decomposition entropy of any implemented state.
    pub fn decomposition_entropy(&self, state: &State) -> Result<EntropyReport> {
        match state {
            State::Quantum(rho) => Ok(EntropyReport {
                quantity: "H_decomp".into(),
                value_bits: quantum::von_neumann_entropy(rho),
                witness: Witness::Eigenbasis,
                exact: true,
            }),
            State::Classical(c) => Ok(self.decomposition_entropy_box(&c.as_box())?.0),
            State::Box(b) => Ok(self.decomposition_entropy_box(b)?.0),
        }
    }
}
