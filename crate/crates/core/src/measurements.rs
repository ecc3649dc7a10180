//! Von Neumann measurements on subsystem `a`, their marginal-invariant
//! subfamily, and the two-outcome weak measurements built from them.

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
#[allow(unused_imports)] // redundant when another crate in the build links std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c, herm_eig, kron, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::{tol, Subsystem};

/// `m` rank-1 orthogonal projectors on `C^m` summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMeasurement {
    projectors: Vec<ComplexMatrix>,
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let m = projectors.len();
        if m == 0 {
            return Err(Error::InvalidMeasurement("no projectors"));
        }
        for p in &projectors {
            if !p.is_square() || p.rows() != m {
                return Err(Error::DimensionMismatch { expected: m, found: p.rows() });
            }
            if p.hermiticity_defect() > tol::PROJECTOR {
                return Err(Error::InvalidMeasurement("projector is not Hermitian"));
            }
            if (p * p - p).hs_norm() > tol::PROJECTOR {
                return Err(Error::InvalidMeasurement("projector is not idempotent"));
            }
            if (p.trace().re - 1.0).abs() > tol::PROJECTOR {
                return Err(Error::InvalidMeasurement("projector is not rank one"));
            }
        }
        for (j, pj) in projectors.iter().enumerate() {
            for pk in &projectors[j + 1..] {
                if (pj * pk).hs_norm() > tol::PROJECTOR {
                    return Err(Error::InvalidMeasurement("projectors are not orthogonal"));
                }
            }
        }
        let mut sum = ComplexMatrix::zeros(m, m);
        for p in &projectors {
            sum += p;
        }
        if (sum - ComplexMatrix::identity(m)).hs_norm() > tol::PROJECTOR {
            return Err(Error::InvalidMeasurement("projectors do not sum to identity"));
        }
        Ok(Self { projectors })
    }

    /// Projectors onto the columns of a unitary, without re-validation.
    pub(crate) fn from_unitary_columns(u: &ComplexMatrix) -> Self {
        let projectors = (0..u.cols())
            .map(|k| {
                let v = u.column(k);
                ComplexMatrix::outer(&v, &v)
            })
            .collect();
        Self { projectors }
    }

    /// Wraps projectors already known to be valid.
    pub(crate) fn from_parts(projectors: Vec<ComplexMatrix>) -> Self {
        Self { projectors }
    }

    /// Measurement in the computational basis.
    pub fn computational(m: usize) -> Self {
        Self::from_unitary_columns(&ComplexMatrix::identity(m))
    }

    pub fn dim(&self) -> usize {
        self.projectors.len()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// `Π_k ⊗ I_n` for every outcome.
    pub fn lifted(&self, n: usize) -> Vec<ComplexMatrix> {
        let id = ComplexMatrix::identity(n);
        self.projectors.iter().map(|p| kron(p, &id)).collect()
    }
}

/// `Π_k = U|k⟩⟨k|U†`.
pub fn projective_from_unitary(u: &ComplexMatrix) -> Result<ProjectiveMeasurement> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.rows(), found: u.cols() });
    }
    let defect = u.unitarity_defect();
    if defect > tol::UNITARY {
        return Err(Error::NotUnitary { deviation: defect });
    }
    Ok(ProjectiveMeasurement::from_unitary_columns(u))
}

/// `Σ_k (P_k ⊗ I) M (P_k ⊗ I)` for arbitrary projectors `P_k` on `a`.
///
/// Works block-wise on the `n × n` blocks of `M` instead of forming the
/// lifted projectors.
pub(crate) fn apply_projectors(op: &ComplexMatrix, projectors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let m = projectors[0].rows();
    if !op.is_square() || op.rows() % m != 0 {
        return Err(Error::DimensionMismatch { expected: m, found: op.rows() });
    }
    let n = op.rows() / m;
    // weights[a][b][c][d] = Σ_k P_k[a,c] P_k[d,b]
    let mut weights = alloc::vec![c(0.0, 0.0); m * m * m * m];
    for p in projectors {
        for a in 0..m {
            for cc in 0..m {
                let pac = p[(a, cc)];
                if pac == c(0.0, 0.0) {
                    continue;
                }
                for b in 0..m {
                    for d in 0..m {
                        weights[((a * m + b) * m + cc) * m + d] += pac * p[(d, b)];
                    }
                }
            }
        }
    }
    let mut out = ComplexMatrix::zeros(op.rows(), op.cols());
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                for d in 0..m {
                    let w = weights[((a * m + b) * m + cc) * m + d];
                    if w.norm_sqr() == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        for j in 0..n {
                            out[(a * n + i, b * n + j)] += w * op[(cc * n + i, d * n + j)];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Π^a(M) = Σ_k (Π_k ⊗ I) M (Π_k ⊗ I)`.
pub fn apply_local_measurement(op: &ComplexMatrix, p: &ProjectiveMeasurement) -> Result<ComplexMatrix> {
    apply_projectors(op, p.projectors())
}

/// Eigenvectors of a Hermitian marginal grouped into (near-)degenerate
/// eigenspaces.
#[derive(Clone, Debug)]
pub struct EigenspaceStructure {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Phase-fixed eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
    /// Column ranges of each eigenspace.
    pub blocks: Vec<Range<usize>>,
}

impl EigenspaceStructure {
    pub fn is_degenerate(&self) -> bool {
        self.blocks.iter().any(|b| b.len() > 1)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Groups the spectrum of a Hermitian matrix into eigenspaces; consecutive
/// eigenvalues closer than `gap_tol` share a block.
pub fn eigenspaces(marginal: &ComplexMatrix, gap_tol: f64) -> Result<EigenspaceStructure> {
    let spec = herm_eig(marginal)?;
    let m = spec.eigenvalues.len();
    let eigenvalues: Vec<f64> = spec.eigenvalues.iter().rev().copied().collect();
    let mut vectors = ComplexMatrix::zeros(m, m);
    for k in 0..m {
        let mut v = spec.eigenvectors.column(m - 1 - k);
        fix_phase(&mut v);
        for (i, z) in v.into_iter().enumerate() {
            vectors[(i, k)] = z;
        }
    }
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=m {
        if k == m || eigenvalues[k - 1] - eigenvalues[k] > gap_tol {
            blocks.push(start..k);
            start = k;
        }
    }
    Ok(EigenspaceStructure { eigenvalues, eigenvectors: vectors, blocks })
}

/// Rotates `v` so that its largest-magnitude component is real positive.
fn fix_phase(v: &mut [Complex64]) {
    let pivot = v
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 + 1e-14 { (i, z.norm()) } else { best })
        .0;
    let z = v[pivot];
    if z.norm() > 0.0 {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Measurements that leave `ρ^a` invariant.
#[derive(Clone, Debug)]
pub enum InvariantMeasurements {
    /// Nondegenerate marginal: its eigenprojectors, by descending eigenvalue.
    Unique(ProjectiveMeasurement),
    /// Some eigenvalue gap is within tolerance; the invariant measurements
    /// form a manifold that callers must search.
    Degenerate(EigenspaceStructure),
}

/// The locally invariant measurements of `ρ` on subsystem `a`.
///
/// For a qubit marginal `ρ^a = ½(I + r·σ)` with `r ≠ 0` the unique
/// measurement is `Π_{1,2} = ½(I ± r̂·σ)`.
pub fn marginal_invariant_measurement(rho: &DensityMatrix, gap_tol: f64) -> Result<InvariantMeasurements> {
    let structure = eigenspaces(&rho.marginal(Subsystem::A), gap_tol)?;
    if structure.is_degenerate() {
        Ok(InvariantMeasurements::Degenerate(structure))
    } else {
        Ok(InvariantMeasurements::Unique(ProjectiveMeasurement::from_unitary_columns(&structure.eigenvectors)))
    }
}

/// Two-outcome weak measurement `Ω_{±x}` of strength `x` built on a split
/// `Π¹ + Π² = I`.
#[derive(Clone, Debug)]
pub struct WeakScheme {
    strength: f64,
    tau1: f64,
    tau2: f64,
    tau: f64,
    split: [ComplexMatrix; 2],
}

impl WeakScheme {
    /// Splits `measurement` as `Π¹ = Σ_{i<k} Π_i`, `Π² = Σ_{i≥k} Π_i`.
    pub fn new(strength: f64, measurement: &ProjectiveMeasurement, k: usize) -> Result<Self> {
        if !strength.is_finite() || strength <= 0.0 {
            return Err(Error::OutOfRange { name: "weak measurement strength", value: strength });
        }
        let m = measurement.dim();
        if k == 0 || k >= m {
            return Err(Error::OutOfRange { name: "split index", value: k as f64 });
        }
        let mut first = ComplexMatrix::zeros(m, m);
        let mut second = ComplexMatrix::zeros(m, m);
        for (i, p) in measurement.projectors().iter().enumerate() {
            if i < k {
                first += p;
            } else {
                second += p;
            }
        }
        // (1 ∓ tanh x)/2 = 1/(1 + e^{±2x}) without cancellation at large x
        let tau1 = (1.0 / (1.0 + (2.0 * strength).exp())).sqrt();
        let tau2 = (1.0 / (1.0 + (-2.0 * strength).exp())).sqrt();
        Ok(Self { strength, tau1, tau2, tau: 2.0 * tau1 * tau2, split: [first, second] })
    }

    /// Qubit scheme: the split is the two rank-1 projectors.
    pub fn qubit(strength: f64, measurement: &ProjectiveMeasurement) -> Result<Self> {
        if measurement.dim() != 2 {
            return Err(Error::WrongDimension(measurement.dim()));
        }
        Self::new(strength, measurement, 1)
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    /// `2τ₁τ₂ = sech x`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn split(&self) -> &[ComplexMatrix; 2] {
        &self.split
    }

    /// `Ω_x = τ₁Π¹ + τ₂Π²`.
    pub fn omega_plus(&self) -> ComplexMatrix {
        self.split[0].scale(self.tau1) + self.split[1].scale(self.tau2)
    }

    /// `Ω_{−x} = τ₂Π¹ + τ₁Π²`.
    pub fn omega_minus(&self) -> ComplexMatrix {
        self.split[0].scale(self.tau2) + self.split[1].scale(self.tau1)
    }
}

/// `Ω(S) = Σ_{k=±x} (Ω_k ⊗ I) S (Ω_k ⊗ I)`, evaluated literally.
pub fn weak_apply(s: &ComplexMatrix, w: &WeakScheme) -> Result<ComplexMatrix> {
    let m = w.split[0].rows();
    if !s.is_square() || s.rows() % m != 0 {
        return Err(Error::DimensionMismatch { expected: m, found: s.rows() });
    }
    let id = ComplexMatrix::identity(s.rows() / m);
    let mut out = ComplexMatrix::zeros(s.rows(), s.cols());
    for omega in [w.omega_plus(), w.omega_minus()] {
        let lifted = kron(&omega, &id);
        out += &(&lifted * s * &lifted);
    }
    Ok(out)
}

/// `ρ_n = τⁿ√ρ + (1 − τⁿ) Π^a(√ρ)`, the state after `n` sequential weak
/// measurements.
pub fn sequential_state(
    sqrt_rho: &ComplexMatrix,
    p: &ProjectiveMeasurement,
    tau: f64,
    n_steps: u32,
) -> Result<ComplexMatrix> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::OutOfRange { name: "tau", value: tau });
    }
    if n_steps == 0 {
        return Ok(sqrt_rho.clone());
    }
    let tn = tau.powi(n_steps.min(i32::MAX as u32) as i32);
    let measured = apply_local_measurement(sqrt_rho, p)?;
    Ok(sqrt_rho.scale(tn) + measured.scale(1.0 - tn))
}
