//! Exact vertex enumeration of the non-signalling polytope.
//!
//! The polytope is `{P >= 0}` intersected with the affine space cut out by
//! normalization and non-signalling. Writing that space as `P0 + W t` with
//! `d` free parameters, every vertex is the unique point at which `d`
//! linearly independent coordinates vanish. The search walks subsets of
//! coordinates in ascending order, keeping an incremental echelon basis of
//! the chosen rows of `W`.

use std::collections::HashSet;

use num_traits::{One, Zero};

use super::{BoxState, Signature};
use crate::error::{Error, Result};
use crate::linalg::{self, Echelon};
use crate::rational::Rational;

/// `{P0 + sum_j t_j directions[j]}`: the affine hull of all states on a
/// signature.
#[derive(Debug, Clone)]
pub struct AffineHull {
    pub point: Vec<Rational>,
    pub directions: Vec<Vec<Rational>>,
}

impl AffineHull {
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    /// Values of a linear functional on the base point and each direction.
    /// Two functionals agree on every state iff these vectors are equal.
    pub fn canonical(&self, coefficients: &[Rational]) -> Vec<Rational> {
        let dot = |v: &[Rational]| -> Rational {
            coefficients.iter().zip(v).filter(|(c, x)| !c.is_zero() && !x.is_zero()).map(|(c, x)| c * x).sum()
        };
        std::iter::once(dot(&self.point)).chain(self.directions.iter().map(|d| dot(d))).collect()
    }
}

/// Linear equality constraints on a table: normalization per joint input
/// and no-signalling for every subsystem.
fn constraints(sig: &Signature) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let n = sig.table_len();
    let m = sig.output_count();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..sig.input_count() {
        let mut row = vec![Rational::zero(); n];
        for o in 0..m {
            row[i * m + o] = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    for k in 0..sig.len() {
        for i in 0..sig.input_count() {
            let mut ins = sig.input_tuple(i);
            if ins[k] == 0 {
                continue;
            }
            let x = ins[k];
            ins[k] = 0;
            let i0 = sig.input_index(&ins);
            ins[k] = x;
            // Per outcome of the other subsystems, summed over subsystem k.
            let mut by_rest: std::collections::BTreeMap<Vec<usize>, Vec<Rational>> = Default::default();
            for o in 0..m {
                let mut outs = sig.output_tuple(o);
                outs.remove(k);
                let row = by_rest.entry(outs).or_insert_with(|| vec![Rational::zero(); n]);
                row[i * m + o] += Rational::one();
                row[i0 * m + o] -= Rational::one();
            }
            for row in by_rest.into_values() {
                rows.push(row);
                rhs.push(Rational::zero());
            }
        }
    }
    (rows, rhs)
}

pub fn affine_hull(sig: &Signature) -> AffineHull {
    let (rows, rhs) = constraints(sig);
    let point = linalg::solve(&rows, &rhs).expect("uniform box satisfies the constraints");
    let directions = linalg::nullspace(&rows, sig.table_len());
    AffineHull { point, directions }
}

/// Pure states of a signature, product vertices first.
#[derive(Debug, Clone)]
pub struct VertexSet {
    pub vertices: Vec<BoxState>,
    /// `product[i]` is true if vertex `i` is a product of local states.
    pub product: Vec<bool>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn product_count(&self) -> usize {
        self.product.iter().filter(|&&p| p).count()
    }

    pub fn entangled_count(&self) -> usize {
        self.len() - self.product_count()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// All vertices of the non-signalling polytope on `sig`, exactly. Errors if
/// the number of candidate coordinate subsets exceeds `limit`.
pub fn enumerate_pure_states(sig: &Signature, limit: u128) -> Result<VertexSet> {
    let hull = affine_hull(sig);
    let n = sig.table_len();
    let d = hull.dimension();
    let candidates = binomial(n, d);
    if candidates > limit {
        return Err(Error::guard("vertex-enumeration coordinate subsets", candidates, limit));
    }
    // rows[c] = coordinate c as an affine function of t.
    let rows: Vec<Vec<Rational>> = (0..n).map(|c| hull.directions.iter().map(|w| w[c].clone()).collect()).collect();

    let mut found: Vec<Vec<Rational>> = Vec::new();
    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    if d == 0 {
        found.push(hull.point.clone());
    } else {
        let mut basis = Echelon::new();
        let mut chosen = Vec::with_capacity(d);
        search(&rows, &hull, d, 0, &mut basis, &mut chosen, &mut |p| {
            if seen.insert(p.clone()) {
                found.push(p);
            }
        });
    }

    let mut vertices: Vec<(bool, BoxState)> = found
        .into_iter()
        .map(|t| {
            let s = BoxState::from_parts(sig.clone(), t);
            (s.is_product(), s)
        })
        .collect();
    // Stable: product vertices first, discovery order otherwise.
    vertices.sort_by_key(|(p, _)| !*p);
    Ok(VertexSet {
        product: vertices.iter().map(|(p, _)| *p).collect(),
        vertices: vertices.into_iter().map(|(_, s)| s).collect(),
    })
}

fn search(
    rows: &[Vec<Rational>],
    hull: &AffineHull,
    d: usize,
    start: usize,
    basis: &mut Echelon,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(Vec<Rational>),
) {
    if chosen.len() == d {
        if let Some(p) = vertex_at(rows, hull, chosen) {
            emit(p);
        }
        return;
    }
    let need = d - chosen.len();
    for c in start..rows.len() {
        if rows.len() - c < need {
            break;
        }
        if !basis.push(&rows[c]) {
            continue;
        }
        chosen.push(c);
        search(rows, hull, d, c + 1, basis, chosen, emit);
        chosen.pop();
        basis.pop();
    }
}

/// Point where the coordinates in `zero` vanish, if it is nonnegative.
fn vertex_at(rows: &[Vec<Rational>], hull: &AffineHull, zero: &[usize]) -> Option<Vec<Rational>> {
    let a: Vec<Vec<Rational>> = zero.iter().map(|&c| rows[c].clone()).collect();
    let b: Vec<Rational> = zero.iter().map(|&c| -hull.point[c].clone()).collect();
    let t = linalg::solve(&a, &b)?;
    let mut p = hull.point.clone();
    for (tj, w) in t.iter().zip(&hull.directions) {
        if tj.is_zero() {
            continue;
        }
        for (x, wc) in p.iter_mut().zip(w) {
            if !wc.is_zero() {
                *x += tj * wc;
            }
        }
    }
    if p.iter().any(|x| x < &Rational::zero()) {
        return None;
    }
    Some(p)
}
