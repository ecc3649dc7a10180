//! Numerical tolerances shared by every module.
//!
//! All values are absolute and calibrated against unit-trace matrices of
//! dimension at most ~64.

/// Hermiticity check for eigensolver input, relative to `max(1, ‖H‖)`.
pub const HERMITIAN: f64 = 1e-9;

/// Eigenvalues of a "PSD" matrix may dip this far below zero before the
/// matrix is rejected. Values in `[-PSD_CLIP, 0)` are clipped to zero.
pub const PSD_CLIP: f64 = 1e-10;

/// Eigenvalues below `EIGEN_NOISE * max(1, λ_max)` are treated as exact
/// zeros before taking square roots. The eigensolver's absolute accuracy is
/// a few ulps of `λ_max`, so smaller values carry no information, while
/// their square roots (~1e-8) would pollute downstream identities.
pub const EIGEN_NOISE: f64 = 64.0 * f64::EPSILON;

/// Hermiticity, unit trace and PSD tolerance for density matrices.
pub const STATE: f64 = 1e-10;

/// `‖U†U − I‖` tolerance for unitaries.
pub const UNITARY: f64 = 1e-10;

/// Projector idempotence, orthogonality and completeness tolerance.
pub const PROJECTOR: f64 = 1e-10;

/// Largest imaginary residue accepted in a correlation-matrix entry.
pub const IMAG_RESIDUE: f64 = 1e-9;

/// Eigenvalue gaps of the `a` marginal at or below this are degenerate.
pub const DEGENERACY: f64 = 1e-8;

/// Measure values in `[-VALUE_CLIP, 0)` are reported as zero.
pub const VALUE_CLIP: f64 = 1e-10;

/// Agreement required between a closed form and the optimizer.
pub const CROSS_CHECK: f64 = 1e-6;

/// Tolerance for `√Π(ρ) = Π(√ρ)` in the affinity-MIN equality test.
pub const AFFINITY_IDENTITY: f64 = 1e-8;

/// Schmidt coefficients must sum to one within this.
pub const SCHMIDT: f64 = 1e-12;
