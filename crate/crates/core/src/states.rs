// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pure and mixed states.

use faer::{Col, Mat, MatRef};

use crate::error::{Error, Result};
use crate::numerics::{
    self, basis_vector, c64, hermitian_eigen, hermiticity_defect, ComplexMatrix, ComplexVector,
    Tolerance,
};

/// Normalized pure state `|Ψ⟩`.
#[derive(Clone, Debug)]
pub struct StateVector {
    amplitudes: ComplexVector,
}

impl StateVector {
    pub fn new(amplitudes: ComplexVector, tol: &Tolerance) -> Result<Self> {
        let norm = numerics::norm(&amplitudes);
        if (norm - 1.0).abs() > tol.eps_check {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm. Fails only for the zero vector.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = numerics::norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: Col::from_fn(amplitudes.nrows(), |i| amplitudes[i] / norm),
        })
    }

    pub fn from_slice(amplitudes: &[c64], tol: &Tolerance) -> Result<Self> {
        Self::new(Col::from_fn(amplitudes.len(), |i| amplitudes[i]), tol)
    }

    /// Site state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        Ok(Self {
            amplitudes: basis_vector(dim, k),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// `|Ψ⟩⟨Ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        numerics::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn inner(&self, other: &StateVector) -> c64 {
        numerics::inner(&self.amplitudes, &other.amplitudes)
    }
}

/// Density operator, possibly unnormalized (conditional states carry the
/// survival probability in their trace).
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Checks Hermiticity, positivity and `Tr ρ ≤ 1` within `eps_check`.
    pub fn new(matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        numerics::ensure_square(matrix.as_ref())?;
        let herm = hermiticity_defect(matrix.as_ref());
        if herm > tol.eps_check {
            return Err(Error::NotHermitian { defect: herm });
        }
        let tr = numerics::trace(matrix.as_ref()).re;
        if tr > 1.0 + tol.eps_check {
            return Err(Error::NotDensityOperator(format!("trace {tr} exceeds 1")));
        }
        let eig = hermitian_eigen(matrix.as_ref(), tol)?;
        if let Some(&min) = eig.values.first() {
            if min < -tol.eps_check {
                return Err(Error::NegativeEigenvalue { value: min });
            }
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self {
            matrix: psi.projector(),
        }
    }

    /// `𝕀 / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let w = c64::new(1.0 / dim as f64, 0.0);
        Self {
            matrix: Mat::from_fn(dim, dim, |i, j| if i == j { w } else { numerics::ZERO }),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        numerics::trace(self.matrix.as_ref()).re
    }

    /// `⟨Ψ|ρ|Ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let v = psi.amplitudes();
        let rv = &self.matrix * v;
        numerics::inner(v, &rv).re
    }

    pub fn min_eigenvalue(&self, tol: &Tolerance) -> Result<f64> {
        let eig = hermitian_eigen(self.matrix.as_ref(), tol)?;
        Ok(eig.values.first().copied().unwrap_or(0.0))
    }

    pub fn max_eigenvalue(&self, tol: &Tolerance) -> Result<f64> {
        let eig = hermitian_eigen(self.matrix.as_ref(), tol)?;
        Ok(eig.values.last().copied().unwrap_or(0.0))
    }
}
