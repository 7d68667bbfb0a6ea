//! Exact linear algebra over rationals: row reduction, null spaces, and an
//! incremental echelon basis used by the vertex and decomposition searches.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace(a: &[Vec<Rational>], n_cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..n_cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n_cols];
            v[f] = Rational::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Solves `A x = b` for any consistent system, returning the solution with
/// free variables set to zero, or `None` if inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n_cols = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n_cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); n_cols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[n_cols].clone();
    }
    Some(x)
}

/// Incrementally maintained echelon basis supporting push/pop, used by
/// depth-first searches over subsets of vectors.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    /// Reduced vectors with their pivot coordinate.
    rows: Vec<(usize, Vec<Rational>)>,
    /// `rows[k] = sum_j combo[k][j] * original[j]`.
    combo: Vec<Vec<Rational>>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Residual of `v` after eliminating against the stored rows, together
    /// with the coefficients used (in terms of stored rows).
    fn reduce(&self, v: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut r = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rows.len());
        for (p, row) in &self.rows {
            if r[*p].is_zero() {
                coeffs.push(Rational::zero());
                continue;
            }
            let f = &r[*p] / &row[*p];
            for (x, y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            coeffs.push(f);
        }
        (r, coeffs)
    }

    /// Adds `v` if it is independent of the stored vectors.
    pub fn push(&mut self, v: &[Rational]) -> bool {
        let (r, coeffs) = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        // new row = v - sum_k coeffs[k] rows[k] = v - sum_k coeffs[k] sum_j combo[k][j] orig[j]
        let m = self.rows.len();
        let mut c = vec![Rational::zero(); m + 1];
        c[m] = Rational::one();
        for (k, f) in coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, t) in self.combo[k].iter().enumerate() {
                if !t.is_zero() {
                    c[j] -= f * t;
                }
            }
        }
        self.rows.push((p, r));
        self.combo.push(c);
        true
    }

    pub fn pop(&mut self) {
        self.rows.pop();
        self.combo.pop();
    }

    /// Coefficients `lambda` with `sum_j lambda[j] * original[j] = v`, if `v`
    /// lies in the span of the pushed vectors.
    pub fn express(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let (r, coeffs) = self.reduce(v);
        if r.iter().any(|x| !x.is_zero()) {
            return None;
        }
        let m = self.rows.len();
        let mut lambda = vec![Rational::zero(); m];
        for (k, f) in coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, t) in self.combo[k].iter().enumerate() {
                if !t.is_zero() {
                    lambda[j] += f * t;
                }
            }
        }
        Some(lambda)
    }
}
