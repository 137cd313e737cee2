// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum channels in Kraus form.
//!
//! A channel acts as `ρ ↦ Σ_j A_j ρ A_j†`. Superoperators are represented
//! as matrices acting on column-stacked operators:
//!
//! ```text
//! vec(ρ)[col * dim + row] = ρ[row, col],    vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)
//! ```
//!
//! Every superoperator matrix in this crate uses that convention.

use faer::{Col, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    self, c64, dagger, hermitian_eigen, max_abs, max_abs_diff, ComplexMatrix, ComplexVector,
    Projector, Tolerance, ONE, ZERO,
};
use crate::states::{DensityOperator, StateVector};

/// One timestep of an open quantum dynamics, as an ordered Kraus set.
///
/// Kraus sets are kept exactly as constructed: zero operators are not
/// pruned and no canonical form is taken.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Outcome of [`QuantumChannel::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub trace_preserving: bool,
    pub completely_positive: bool,
    pub unital_global: bool,
    pub max_normalization_defect: f64,
    pub max_unitality_defect: f64,
}

/// Index of `ρ[row, col]` in `vec(ρ)`.
#[inline]
pub fn vec_index(row: usize, col: usize, dim: usize) -> usize {
    col * dim + row
}

pub fn vectorize(m: MatRef<'_, c64>) -> ComplexVector {
    let d = m.nrows();
    Col::from_fn(d * m.ncols(), |k| m[(k % d, k / d)])
}

pub fn unvectorize(v: &ComplexVector, dim: usize) -> ComplexMatrix {
    Mat::from_fn(dim, dim, |i, j| v[vec_index(i, j, dim)])
}

impl QuantumChannel {
    /// Builds a channel and checks `Σ A_j†A_j = 𝕀` within `eps_check`.
    pub fn new(kraus: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        let defect = ch.normalization_defect();
        if defect > tol.eps_check {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(ch)
    }

    /// Shape checks only. Used for restrictions, duals of non-unital maps
    /// and externally loaded Kraus sets that are validated afterwards.
    pub fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidSpec("a channel needs at least one Kraus operator".into()))?;
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        for a in &kraus {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: if a.nrows() != dim { a.nrows() } else { a.ncols() },
                });
            }
            if !numerics::is_finite(a.as_ref()) {
                return Err(Error::InvalidSpec("Kraus operator has non-finite entries".into()));
            }
        }
        Ok(Self { dim, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![Mat::identity(dim, dim)],
        }
    }

    /// Single-Kraus channel `ρ ↦ U ρ U†`.
    pub fn unitary(u: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let n = numerics::ensure_square(u.as_ref())?;
        let defect = max_abs_diff((u.adjoint() * &u).as_ref(), Mat::<c64>::identity(n, n).as_ref());
        if defect > tol.eps_check {
            return Err(Error::NotUnitary { defect });
        }
        Self::from_kraus_unchecked(vec![u])
    }

    /// The map sending every operator to zero.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![Mat::zeros(dim, dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    pub(crate) fn apply_unchecked(&self, rho: MatRef<'_, c64>) -> ComplexMatrix {
        let mut out = Mat::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out += a * rho * a.adjoint();
        }
        out
    }

    /// `Σ_j A_j ρ A_j†`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_dim(rho.dim())?;
        Ok(DensityOperator::from_matrix_unchecked(
            self.apply_unchecked(rho.as_ref()),
        ))
    }

    /// Same as [`apply`](Self::apply) for an arbitrary square operator.
    pub fn apply_matrix(&self, m: MatRef<'_, c64>) -> Result<ComplexMatrix> {
        numerics::ensure_square(m)?;
        self.check_dim(m.nrows())?;
        Ok(self.apply_unchecked(m))
    }

    /// Heisenberg-picture action `Σ_j A_j† X A_j`.
    pub fn apply_adjoint_matrix(&self, m: MatRef<'_, c64>) -> Result<ComplexMatrix> {
        numerics::ensure_square(m)?;
        self.check_dim(m.nrows())?;
        let mut out = Mat::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out += a.adjoint() * m * a;
        }
        Ok(out)
    }

    /// `‖Σ A_j†A_j − 𝕀‖_max`.
    pub fn normalization_defect(&self) -> f64 {
        let id = Mat::<c64>::identity(self.dim, self.dim);
        // Σ A† 𝕀 A
        let s = self.apply_adjoint_matrix(id.as_ref()).expect("dims match");
        max_abs_diff(s.as_ref(), id.as_ref())
    }

    /// `‖Σ A_j A_j† − 𝕀‖_max`.
    pub fn unitality_defect(&self) -> f64 {
        let id = Mat::<c64>::identity(self.dim, self.dim);
        let s = self.apply_unchecked(id.as_ref());
        max_abs_diff(s.as_ref(), id.as_ref())
    }

    /// Choi matrix `Σ_j vec(A_j) vec(A_j)†` (dim² × dim²).
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let n = self.dim * self.dim;
        let mut c = Mat::zeros(n, n);
        for a in &self.kraus {
            let v = vectorize(a.as_ref());
            c += numerics::outer(&v, &v);
        }
        c
    }

    pub fn validate(&self, tol: &Tolerance) -> ValidationReport {
        let norm_defect = self.normalization_defect();
        let unital_defect = self.unitality_defect();
        let choi = self.choi_matrix();
        let choi_trace = numerics::trace(choi.as_ref()).re;
        let floor = -tol.eps_check * choi_trace.abs().max(f64::MIN_POSITIVE) / self.dim as f64;
        let completely_positive = match hermitian_eigen(choi.as_ref(), tol) {
            Ok(eig) => eig.values.first().is_none_or(|&l| l >= floor),
            Err(_) => false,
        };
        ValidationReport {
            trace_preserving: norm_defect < tol.eps_check,
            completely_positive,
            unital_global: unital_defect < tol.eps_check,
            max_normalization_defect: norm_defect,
            max_unitality_defect: unital_defect,
        }
    }

    /// Dual channel with Kraus set `{A_j†}`.
    ///
    /// For a unital input the dual is trace preserving. For a non-unital
    /// input the result is returned as a raw Kraus set; it is not a
    /// physical channel.
    pub fn dual(&self) -> QuantumChannel {
        Self {
            dim: self.dim,
            kraus: self.kraus.iter().map(|a| dagger(a.as_ref())).collect(),
        }
    }

    /// Kraus set `{A_j Π}`. The result preserves the trace of states
    /// supported in `Π`, which is checked as `Σ Π A_j†A_j Π = Π`.
    pub fn restrict(&self, pi: &Projector, tol: &Tolerance) -> Result<QuantumChannel> {
        self.check_dim(pi.dim())?;
        let p = pi.matrix();
        let kraus: Vec<ComplexMatrix> = self.kraus.iter().map(|a| a * p).collect();
        let restricted = Self {
            dim: self.dim,
            kraus,
        };
        let s = restricted
            .apply_adjoint_matrix(Mat::<c64>::identity(self.dim, self.dim).as_ref())?;
        let defect = max_abs_diff(s.as_ref(), p.as_ref());
        if defect > tol.eps_check {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(restricted)
    }

    /// Matrix of `ρ ↦ ℳ[𝒮[ρ]]` with `ℳ[σ] = Π σ Π`, or of `𝒮` alone.
    pub fn to_superoperator_matrix(&self, filter: Option<&Projector>) -> Result<ComplexMatrix> {
        if let Some(p) = filter {
            self.check_dim(p.dim())?;
        }
        let d = self.dim;
        let n = d * d;
        let mut s = Mat::<c64>::zeros(n, n);
        for a in &self.kraus {
            let a = match filter {
                Some(p) => p.matrix() * a,
                None => a.clone(),
            };
            // (conj(A) ⊗ A)[(c d + r), (c' d + r')] = A[r, r'] conj(A[c, c'])
            for c in 0..d {
                for cp in 0..d {
                    let ac = a[(c, cp)].conj();
                    if ac == ZERO {
                        continue;
                    }
                    for r in 0..d {
                        for rp in 0..d {
                            s[(vec_index(r, c, d), vec_index(rp, cp, d))] += a[(r, rp)] * ac;
                        }
                    }
                }
            }
        }
        Ok(s)
    }

    /// `‖Σ_j A_j Π A_j† − Π‖_max`.
    pub fn unitality_defect_on(&self, pi: &Projector) -> Result<f64> {
        self.check_dim(pi.dim())?;
        let image = self.apply_unchecked(pi.matrix().as_ref());
        Ok(max_abs_diff(image.as_ref(), pi.matrix().as_ref()))
    }

    /// Whether the channel maps `Π` to itself (unital on `Π`'s range).
    pub fn is_unital_on(&self, pi: &Projector, tol: &Tolerance) -> Result<bool> {
        Ok(self.unitality_defect_on(pi)? < tol.eps_check)
    }

    /// Classical transition matrix of the channel in the site basis:
    /// `P[m][n] = ⟨n| 𝒮[|m⟩⟨m|] |n⟩`. Row-stochastic for trace-preserving
    /// channels; exactly the dynamics once coherences are destroyed.
    pub fn diagonal_action(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        (0..d)
            .map(|m| {
                (0..d)
                    .map(|n| self.kraus.iter().map(|a| a[(n, m)].norm_sqr()).sum())
                    .collect()
            })
            .collect()
    }

    /// Largest entry magnitude over all Kraus operators.
    pub fn max_entry(&self) -> f64 {
        self.kraus.iter().map(|a| max_abs(a.as_ref())).fold(0.0, f64::max)
    }

    /// Hermitian operators spanning the fixed space `{X : 𝒮[X] = X}`,
    /// read off the kernel of `S − 𝕀` (singular values below
    /// `eps_rank · dim²`).
    pub fn fixed_points(&self, tol: &Tolerance) -> Result<Vec<ComplexMatrix>> {
        let d = self.dim;
        let n = d * d;
        let mut s = self.to_superoperator_matrix(None)?;
        for k in 0..n {
            s[(k, k)] -= ONE;
        }
        let svd = s
            .svd()
            .map_err(|e| Error::Eigen(format!("SVD of S - I failed: {e:?}")))?;
        let sigma = svd.S().column_vector();
        let v = svd.V();
        let threshold = tol.eps_rank * n as f64;
        let mut out = Vec::new();
        for k in 0..n {
            if sigma[k].re >= threshold {
                continue;
            }
            let x = unvectorize(&v.col(k).to_owned(), d);
            let xd = dagger(x.as_ref());
            let half = c64::new(0.5, 0.0);
            let minus_half_i = c64::new(0.0, -0.5);
            for h in [
                numerics::scale((&x + &xd).as_ref(), half),
                numerics::scale((&x - &xd).as_ref(), minus_half_i),
            ] {
                if max_abs(h.as_ref()) > tol.eps_check {
                    out.push(h);
                }
            }
        }
        Ok(out)
    }
}

/// `outer ∘ inner`, Kraus set `{B_k A_j}` ordered with the inner index
/// varying slowest.
pub fn compose(outer: &QuantumChannel, inner: &QuantumChannel) -> Result<QuantumChannel> {
    if outer.dim != inner.dim {
        return Err(Error::DimensionMismatch {
            expected: inner.dim,
            found: outer.dim,
        });
    }
    let mut kraus = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
    for a in &inner.kraus {
        for b in &outer.kraus {
            kraus.push(b * a);
        }
    }
    Ok(QuantumChannel {
        dim: inner.dim,
        kraus,
    })
}

/// No-return projector `𝕀 − |Ψ⟩⟨Ψ|`.
pub fn measurement_filter(psi: &StateVector, tol: &Tolerance) -> Result<Projector> {
    let norm = numerics::norm(psi.amplitudes());
    if (norm - 1.0).abs() > tol.eps_check {
        return Err(Error::NotNormalized { norm });
    }
    let v = psi.amplitudes();
    let d = psi.dim();
    let m = Mat::from_fn(d, d, |i, j| {
        let id = if i == j { ONE } else { ZERO };
        id - v[i] * v[j].conj()
    });
    Projector::new(m, tol)
}
