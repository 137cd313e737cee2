// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Recurrence and first-return times of iterated open quantum dynamics.
//!
//! A channel `𝒮` is iterated from a pure state `|Ψ⟩`, with a measurement
//! after every step asking whether the system has returned. The crate
//! computes the first-return distribution, the expected return time `T`
//! (exactly, from the spectrum of the conditional dynamics) and the
//! dimension of the relevant subspace, and checks that `T` equals that
//! dimension whenever the channel is unital on it.
//!
//! ```
//! use qrecur::{builders, recurrence, StateVector, Tolerance};
//!
//! let ch = builders::uniform_decoherence(4, 0.3).unwrap();
//! let psi = StateVector::basis(4, 0).unwrap();
//! let a = recurrence::quantization_verdict(&ch, &psi, 10, &Tolerance::default()).unwrap();
//! assert!(a.psi_unital);
//! assert!((a.exact_t - a.relevant_dim as f64).abs() < 1e-9);
//! ```

pub mod builders;
pub mod channel;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod numerics;
pub mod recurrence;
pub mod rng;
pub mod states;

pub use channel::{QuantumChannel, ValidationReport};
pub use error::{Error, Result};
pub use numerics::{c64, ComplexMatrix, ComplexVector, Projector, Tolerance};
pub use recurrence::{Method, ReturnAnalysis};
pub use states::{DensityOperator, StateVector};
