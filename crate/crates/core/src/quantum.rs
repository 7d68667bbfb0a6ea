//! Finite-dimensional quantum theory: density matrices, POVMs and the
//! eigenbasis route to measurement entropy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::info;

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance on Hermiticity, trace and completeness.
pub const TOLERANCE: f64 = 1e-10;

/// Density matrix on a tensor product of factors with dimensions `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let d: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidSystem(format!("Hilbert space factors {dims:?}")));
        }
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidState(format!("{}x{} matrix for dimension {d}", matrix.nrows(), matrix.ncols())));
        }
        if max_abs(&(&matrix - matrix.adjoint())) > TOLERANCE {
            return Err(Error::InvalidState("matrix is not Hermitian".into()));
        }
        let matrix = hermitian_part(&matrix);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TOLERANCE {
            return Err(Error::Normalization(format!("trace is {trace}")));
        }
        let min = hermitian_eigenvalues(&matrix)[0];
        if min < -TOLERANCE {
            return Err(Error::InvalidState(format!("eigenvalue {min} is negative")));
        }
        Ok(Self { dims, matrix })
    }

    pub fn single(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        Self::new(vec![d], matrix)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { dims: vec![d], matrix: CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0) }
    }

    /// `|psi><psi|` for a normalized copy of `psi`.
    pub fn pure(dims: Vec<usize>, psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Self::new(dims, &v * v.adjoint())
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        let m = CMatrix::from_diagonal(&DVector::from_iterator(d, probs.iter().map(|&p| Complex64::new(p, 0.0))));
        Self::new(vec![d], m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Eigenvalues with `[-1e-10, 0)` clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).into_iter().map(|l| if l < 0.0 { 0.0 } else { l }).collect()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.iter().chain(&other.dims).copied().collect(),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Reduced state on the factors `keep`, in that order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.dims.len();
        for (i, &k) in keep.iter().enumerate() {
            if k >= n || keep[..i].contains(&k) {
                return Err(Error::OutOfRange(format!("factor {k} of {n}")));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
        let kdims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let tdims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let kd: usize = kdims.iter().product();
        let td: usize = tdims.iter().product();
        let full = |kept: &[usize], tr: &[usize]| -> usize {
            let mut digits = vec![0usize; n];
            for (&k, &v) in keep.iter().zip(kept) {
                digits[k] = v;
            }
            for (&k, &v) in traced.iter().zip(tr) {
                digits[k] = v;
            }
            crate::boxworld::encode(&digits, self.dims.iter().copied())
        };
        let mut out = CMatrix::zeros(kd, kd);
        for r in 0..kd {
            let rk = crate::boxworld::decode(r, kdims.iter().copied());
            for c in 0..kd {
                let ck = crate::boxworld::decode(c, kdims.iter().copied());
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..td {
                    let tt = crate::boxworld::decode(t, tdims.iter().copied());
                    acc += self.matrix[(full(&rk, &tt), full(&ck, &tt))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityMatrix { dims: kdims, matrix: out })
    }

    pub fn mix(&self, weight: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dims != other.dims {
            return Err(Error::SystemMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::OutOfRange(format!("mixing weight {weight}")));
        }
        let w = Complex64::new(weight, 0.0);
        let v = Complex64::new(1.0 - weight, 0.0);
        Ok(DensityMatrix { dims: self.dims.clone(), matrix: &self.matrix * w + &other.matrix * v })
    }
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    info::shannon(&rho.eigenvalues())
}

/// `S(AB) - S(B)` for a bipartition of the factors of `rho`.
pub fn conditional_vn(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let s_ab = von_neumann_entropy(&rho.partial_trace(&ab)?);
    let s_b = if b.is_empty() { 0.0 } else { von_neumann_entropy(&rho.partial_trace(b)?) };
    Ok(s_ab - s_b)
}

/// `(1/2) sum |eigenvalues of rho - sigma|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims != sigma.dims {
        return Err(Error::SystemMismatch(format!("{:?} vs {:?}", rho.dims, sigma.dims)));
    }
    let diff = &rho.matrix - &sigma.matrix;
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>())
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::InvalidMeasurement("POVM has no effects".into()));
        };
        let d = first.nrows();
        let mut sum = CMatrix::zeros(d, d);
        for (r, e) in effects.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::SystemMismatch(format!("effect {r} is {}x{}", e.nrows(), e.ncols())));
            }
            if max_abs(&(e - e.adjoint())) > TOLERANCE {
                return Err(Error::InvalidMeasurement(format!("effect {r} is not Hermitian")));
            }
            if hermitian_eigenvalues(e)[0] < -TOLERANCE {
                return Err(Error::InvalidMeasurement(format!("effect {r} is not positive")));
            }
            sum += e;
        }
        if max_abs(&(sum - CMatrix::identity(d, d))) > TOLERANCE {
            return Err(Error::InvalidMeasurement("effects do not sum to the identity".into()));
        }
        Ok(Self { effects })
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_basis(basis: &CMatrix) -> Result<Self> {
        let effects = basis
            .column_iter()
            .map(|c| {
                let v = c.clone_owned();
                &v * v.adjoint()
            })
            .collect();
        Self::new(effects)
    }

    /// Measurement in the eigenbasis of `rho`.
    pub fn eigenbasis(rho: &DensityMatrix) -> Self {
        let eig = rho.matrix.clone().symmetric_eigen();
        Self::from_basis(&eig.eigenvectors).expect("eigenvectors are orthonormal")
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    /// Fine-grained iff every effect has rank one.
    pub fn is_fine_grained(&self) -> bool {
        self.effects.iter().all(|e| {
            let eig = hermitian_eigenvalues(e);
            let scale = eig.last().copied().unwrap_or(0.0);
            scale > TOLERANCE && eig.iter().filter(|&&l| l > TOLERANCE * scale.max(1.0)).count() == 1
        })
    }

    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::SystemMismatch(format!("POVM on dimension {} vs state {}", self.dim(), rho.dim())));
        }
        Ok(self.effects.iter().map(|e| (rho.matrix() * e).trace().re.max(0.0)).collect())
    }
}

pub fn povm_output_entropy(rho: &DensityMatrix, povm: &Povm) -> Result<f64> {
    Ok(info::shannon(&povm.probabilities(rho)?))
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// `S^{-1/2}` for a positive definite Hermitian matrix.
fn inverse_sqrt(s: &CMatrix) -> CMatrix {
    let eig = s.clone().symmetric_eigen();
    let d = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::new(1.0 / l.sqrt(), 0.0)),
    );
    &eig.eigenvectors * CMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// Random rank-one POVM with `n_outcomes >= d` effects: Gaussian frame
/// vectors `g_r` rescaled by `S^{-1/2}` where `S = sum_r g_r g_r^dagger`.
pub fn sample_random_rank1_povm(d: usize, n_outcomes: usize, seed: u64) -> Result<Povm> {
    if d == 0 || n_outcomes < d {
        return Err(Error::OutOfRange(format!("{n_outcomes} outcomes in dimension {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(d, n_outcomes, &mut rng);
    let s = &g * g.adjoint();
    let v = inverse_sqrt(&s) * g;
    let effects = v
        .column_iter()
        .map(|c| {
            let c = c.clone_owned();
            let e = &c * c.adjoint();
            hermitian_part(&e)
        })
        .collect();
    Povm::new(effects)
}

/// Random density matrix `G G^dagger / tr` with complex Gaussian `G`.
pub fn sample_random_density_matrix(d: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(d, d, &mut rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::single(hermitian_part(&(m / tr))).expect("Wishart matrix is a state")
}
