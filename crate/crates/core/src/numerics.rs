// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Matrices are stored as [`faer::Mat<c64>`]. Everything here is small
//! (dimension at most a few dozen for the superoperators we build), so the
//! routines favour clarity over blocking or in-place tricks.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Col, Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use faer::c64;

/// Dense complex matrix, row/column addressable as `m[(i, j)]`.
pub type ComplexMatrix = Mat<c64>;
/// Dense complex column vector.
pub type ComplexVector = Col<c64>;

pub(crate) const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: c64 = c64 { re: 1.0, im: 0.0 };

/// Numerical thresholds used throughout the crate.
///
/// * `eps_rank` is relative: an eigenvalue counts as nonzero when it exceeds
///   `eps_rank` times the largest one.
/// * `eps_check` bounds invariant checks (Hermiticity, normalization, ...).
/// * `eps_converge` truncates series and drops negligible spectral terms.
/// * `eps_quantize` is how close a return time must be to the relevant
///   dimension before it counts as quantized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerance {
    pub eps_rank: f64,
    pub eps_check: f64,
    pub eps_converge: f64,
    pub eps_quantize: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_rank: 1e-10,
            eps_check: 1e-9,
            eps_converge: 1e-12,
            eps_quantize: 1e-6,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_rank", self.eps_rank),
            ("eps_check", self.eps_check),
            ("eps_converge", self.eps_converge),
            ("eps_quantize", self.eps_quantize),
        ] {
            if !(v > 0.0 && v < 1e-2) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v} must lie in (0, 1e-2)"
                )));
            }
        }
        Ok(())
    }
}

/// Orthogonal projector `Π = Π† = Π²`.
#[derive(Clone, Debug)]
pub struct Projector {
    matrix: ComplexMatrix,
}

impl Projector {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        ensure_square(matrix.as_ref())?;
        let herm = hermiticity_defect(matrix.as_ref());
        if herm > tol.eps_check {
            return Err(Error::NotHermitian { defect: herm });
        }
        let idem = max_abs_diff((&matrix * &matrix).as_ref(), matrix.as_ref());
        if idem > tol.eps_check {
            return Err(Error::NotProjector { defect: idem });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: Mat::identity(dim, dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: Mat::zeros(dim, dim),
        }
    }

    /// `Σ_k |b_k⟩⟨b_k|` for an orthonormal family `b`.
    pub fn from_orthonormal(basis: &[ComplexVector], dim: usize) -> Self {
        let mut matrix = Mat::zeros(dim, dim);
        for b in basis {
            for i in 0..dim {
                for j in 0..dim {
                    matrix[(i, j)] += b[i] * b[j].conj();
                }
            }
        }
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace(self.matrix.as_ref()).re
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        self.trace().round().max(0.0) as usize
    }

    /// `𝕀 − Π`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self {
            matrix: Mat::from_fn(n, n, |i, j| {
                let id = if i == j { ONE } else { ZERO };
                id - self.matrix[(i, j)]
            }),
        }
    }

    /// `Π M Π`.
    pub fn sandwich(&self, m: MatRef<'_, c64>) -> ComplexMatrix {
        &self.matrix * m * &self.matrix
    }
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Eigendecomposition of a general square matrix.
///
/// `left` holds the inverse of `right` (its rows are the dual left
/// eigenvectors) and is `None` when the matrix is flagged defective.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<c64>,
    pub right: ComplexMatrix,
    pub left: Option<ComplexMatrix>,
    /// 2-norm condition number of `right`.
    pub condition: f64,
    pub defective: bool,
}

impl EigenDecomposition {
    /// `Σ_n α_n |r_n⟩⟨l_n|`; `None` if defective.
    pub fn reconstruct(&self) -> Option<ComplexMatrix> {
        let left = self.left.as_ref()?;
        let n = self.right.nrows();
        let scaled = Mat::from_fn(n, n, |i, k| self.right[(i, k)] * self.eigenvalues[k]);
        Some(&scaled * left)
    }

    /// Expansion coefficients of `v` in the right eigenvectors.
    pub fn coefficients(&self, v: &ComplexVector) -> Option<ComplexVector> {
        let left = self.left.as_ref()?;
        Some(left * v)
    }
}

pub fn ensure_square(m: MatRef<'_, c64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    debug_assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            best = best.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    best
}

pub fn hermiticity_defect(m: MatRef<'_, c64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..=j.min(m.nrows().saturating_sub(1)) {
            best = best.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    best
}

pub fn is_finite(m: MatRef<'_, c64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].re.is_finite() && m[(i, j)].im.is_finite()))
}

pub fn trace(m: MatRef<'_, c64>) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub fn dagger(m: MatRef<'_, c64>) -> ComplexMatrix {
    m.adjoint().to_owned()
}

/// `⟨a|b⟩ = Σ conj(a_i) b_i`.
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> c64 {
    (0..a.nrows()).map(|i| a[i].conj() * b[i]).sum()
}

pub fn norm(v: &ComplexVector) -> f64 {
    (0..v.nrows()).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt()
}

/// `|a⟩⟨b|`.
pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
    Mat::from_fn(a.nrows(), b.nrows(), |i, j| a[i] * b[j].conj())
}

pub fn scale(m: MatRef<'_, c64>, s: c64) -> ComplexMatrix {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub fn basis_vector(dim: usize, k: usize) -> ComplexVector {
    Col::from_fn(dim, |i| if i == k { ONE } else { ZERO })
}

/// Hermitian eigendecomposition. The input is symmetrized after the
/// Hermiticity check so round-off in the lower triangle is ignored.
pub fn hermitian_eigen(h: MatRef<'_, c64>, tol: &Tolerance) -> Result<HermitianEigen> {
    let n = ensure_square(h)?;
    let defect = hermiticity_defect(h);
    if defect > tol.eps_check * max_abs(h).max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }
    let sym = Mat::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let evd = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..n).map(|k| s[k].re).collect();
    Ok(HermitianEigen {
        values,
        vectors: evd.U().to_owned(),
    })
}

/// Projector onto the support of a Hermitian positive semidefinite operator.
///
/// Eigenvalues at or below `eps_rank · λ_max` are treated as zero. An
/// operator whose largest eigenvalue is at most `eps_check` has empty support.
pub fn support_projector(sigma: MatRef<'_, c64>, tol: &Tolerance) -> Result<Projector> {
    let n = ensure_square(sigma)?;
    let defect = hermiticity_defect(sigma);
    if defect > tol.eps_check {
        return Err(Error::NotHermitian { defect });
    }
    let eig = hermitian_eigen(sigma, tol)?;
    let lambda_max = eig.values.iter().copied().fold(0.0f64, f64::max);
    let lambda_min = eig.values.iter().copied().fold(0.0f64, f64::min);
    if lambda_max <= tol.eps_check {
        if lambda_min < -tol.eps_check {
            return Err(Error::NegativeEigenvalue { value: lambda_min });
        }
        return Ok(Projector::zero(n));
    }
    if lambda_min < -tol.eps_check * lambda_max {
        return Err(Error::NegativeEigenvalue { value: lambda_min });
    }
    let cutoff = tol.eps_rank * lambda_max;
    let kept: Vec<ComplexVector> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > cutoff)
        .map(|(k, _)| eig.vectors.col(k).to_owned())
        .collect();
    Ok(Projector::from_orthonormal(&kept, n))
}

/// `U = e^{-iH}` for Hermitian `H`, via `H = V diag(λ) V†`.
pub fn unitary_from_hamiltonian(h: MatRef<'_, c64>, tol: &Tolerance) -> Result<ComplexMatrix> {
    let n = ensure_square(h)?;
    let defect = hermiticity_defect(h);
    if defect > tol.eps_check {
        return Err(Error::NotHermitian { defect });
    }
    let eig = hermitian_eigen(h, tol)?;
    let v = &eig.vectors;
    let phased = Mat::from_fn(n, n, |i, k| {
        let l = eig.values[k];
        v[(i, k)] * c64::new(l.cos(), -l.sin())
    });
    Ok(&phased * v.adjoint())
}

/// Right eigenpairs of a general square matrix, plus the dual basis.
///
/// Matrices whose eigenvector matrix has condition number above
/// `1 / eps_rank` are flagged `defective`; callers must not use the
/// spectral expansion for them.
pub fn eig_general(m: MatRef<'_, c64>, tol: &Tolerance) -> Result<EigenDecomposition> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            right: Mat::zeros(0, 0),
            left: Some(Mat::zeros(0, 0)),
            condition: 1.0,
            defective: false,
        });
    }
    if !is_finite(m) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let evd = m.eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let eigenvalues: Vec<c64> = (0..n).map(|k| s[k]).collect();
    let raw = evd.U();
    let right = Mat::from_fn(n, n, |i, k| {
        let nrm = (0..n).map(|r| raw[(r, k)].norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            raw[(i, k)] / nrm
        } else {
            raw[(i, k)]
        }
    });

    let mut condition = f64::INFINITY;
    if is_finite(right.as_ref()) {
        if let Ok(sv) = right.singular_values() {
            let smax = sv.iter().copied().fold(0.0f64, f64::max);
            let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
            if smin > 0.0 {
                condition = smax / smin;
            }
        }
    }
    let mut defective = !(condition.is_finite() && condition <= 1.0 / tol.eps_rank);
    let left = if defective {
        None
    } else {
        let inv = right.partial_piv_lu().inverse();
        if is_finite(inv.as_ref()) {
            Some(inv)
        } else {
            defective = true;
            None
        }
    };
    Ok(EigenDecomposition {
        eigenvalues,
        right,
        left,
        condition,
        defective,
    })
}

/// Gram–Schmidt extension of an orthonormal family.
///
/// Each candidate contributes its component orthogonal to the running span
/// when that component's norm exceeds `eps_rank`. Projections are done
/// twice per candidate to keep the output orthonormal to working precision.
pub fn extend_orthonormal_basis(
    basis: Vec<ComplexVector>,
    candidates: &[ComplexVector],
    tol: &Tolerance,
) -> Vec<ComplexVector> {
    let mut out = basis;
    for cand in candidates {
        if let Some(v) = orthogonal_residual(&out, cand, tol.eps_rank) {
            out.push(v);
        }
    }
    out
}

/// Normalized component of `cand` orthogonal to `basis`, if non-negligible.
pub(crate) fn orthogonal_residual(
    basis: &[ComplexVector],
    cand: &ComplexVector,
    threshold: f64,
) -> Option<ComplexVector> {
    let mut v = cand.clone();
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &v);
            for i in 0..v.nrows() {
                v[i] -= b[i] * c;
            }
        }
    }
    let nrm = norm(&v);
    if nrm > threshold {
        Some(Col::from_fn(v.nrows(), |i| v[i] / nrm))
    } else {
        None
    }
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(eigenvalues: &[c64]) -> f64 {
    eigenvalues.iter().map(|a| a.norm()).fold(0.0, f64::max)
}
