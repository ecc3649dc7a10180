//! Measurement-induced nonlocality for finite-dimensional bipartite states.
//!
//! The crate computes the Hilbert-Schmidt MIN, the Hellinger-distance MIN
//! (H-MIN), its weak and sequential-measurement variants, skew-information
//! MIN and affinity MIN for a density matrix on `C^m ⊗ C^n`. Every closed
//! form is paired with a derivative-free optimizer over von Neumann
//! measurements on subsystem `a`, so each value can be checked against a
//! brute-force search of the defining maximization.
//!
//! Layout:
//!
//! - [`linalg`]: dense complex kernel (Hermitian eigensolver, PSD square
//!   root, Kronecker products, partial traces).
//! - [`basis`]: generalized Gell-Mann bases and the correlation-matrix
//!   decomposition of bipartite operators.
//! - [`states`]: validated density matrices and the standard families
//!   (pure, Bell-diagonal, isotropic, Werner, random).
//! - [`measurements`]: projective, marginal-invariant and weak measurements.
//! - [`optimizer`]: grid + Nelder-Mead search over measurements.
//! - [`measures`]: the correlation measures themselves.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basis;
mod error;
pub mod linalg;
pub mod measurements;
pub mod measures;
pub mod optimizer;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Spectrum, Subsystem};
pub use measurements::{ProjectiveMeasurement, WeakScheme};
pub use measures::{MeasureKind, MeasureOptions, MeasureReport, Method};
pub use num_complex::Complex64;
pub use optimizer::{Goal, MeasurementParams, OptimizerConfig, OptimizerResult};
pub use states::{DensityMatrix, SchmidtForm};
