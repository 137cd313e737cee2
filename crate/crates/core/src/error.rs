// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::recurrence::ReturnAnalysis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator has a negative eigenvalue {value:.3e}")]
    NegativeEigenvalue { value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("Kraus set is not trace preserving (max |sum A^dagger A - I| = {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error("matrix is not unitary (max |U^dagger U - I| = {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not a projector (defect {defect:.3e})")]
    NotProjector { defect: f64 },

    #[error("operator is not a density operator: {0}")]
    NotDensityOperator(String),

    #[error("rate {0} is outside [0, 1]")]
    RateOutOfRange(f64),

    #[error("index {index} is out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("hopping amplitude v_{index} is zero")]
    ZeroHopping { index: usize },

    #[error("row {row} of the transition matrix sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("dynamics is not recurrent (spectral radius {spectral_radius})")]
    NonRecurrent { spectral_radius: f64 },

    #[error("return-time series did not converge within {horizon} steps (tail estimate {tail:.3e})")]
    NonConvergent { horizon: usize, tail: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error(
        "quantization violated: channel is unital on the relevant space but |T - dim| = {defect:.3e}"
    )]
    TheoremViolation {
        defect: f64,
        analysis: Box<ReturnAnalysis>,
    },

    #[error("decile band undefined: {count_infinite} of {n} samples have infinite return time")]
    UndefinedBand { count_infinite: usize, n: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("ensemble sample {sample} (seed {seed:#018x}) failed: {source}")]
    Sample {
        sample: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
