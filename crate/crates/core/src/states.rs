//! Density matrices and the standard bipartite state families.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // redundant when another crate in the build links std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{c, herm_eig, kron, partial_trace, psd_sqrt, ComplexMatrix, Spectrum, Subsystem};
use crate::tol;

/// A validated state on `C^m ⊗ C^n`: Hermitian, unit trace and PSD, each
/// to [`tol::STATE`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    m: usize,
    n: usize,
}

/// Checks that `mat` is a density matrix and returns its spectrum.
pub fn validate_density(mat: &ComplexMatrix) -> Result<Spectrum> {
    if !mat.is_square() {
        return Err(Error::DimensionMismatch { expected: mat.rows(), found: mat.cols() });
    }
    let defect = mat.hermiticity_defect();
    if defect > tol::STATE {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let trace = mat.trace().re;
    if (trace - 1.0).abs() > tol::STATE {
        return Err(Error::InvalidTrace { trace });
    }
    let spec = herm_eig(mat)?;
    if spec.min() < -tol::STATE {
        return Err(Error::NotPsd { min_eigenvalue: spec.min() });
    }
    Ok(spec)
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidDimension(m.min(n)));
        }
        if !matrix.is_square() || matrix.rows() != m * n {
            return Err(Error::DimensionMismatch { expected: m * n, found: matrix.rows() });
        }
        validate_density(&matrix)?;
        Ok(Self { matrix: matrix.hermitian_part(), m, n })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn marginal(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.matrix, (self.m, self.n), keep).expect("dimensions validated at construction")
    }

    pub fn sqrt(&self) -> Result<ComplexMatrix> {
        psd_sqrt(&self.matrix)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        herm_eig(&self.matrix)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        crate::linalg::trace_product(&self.matrix, &self.matrix).re
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn local_unitary(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Self> {
        check_unitary(u, self.m)?;
        check_unitary(v, self.n)?;
        let w = kron(u, v);
        Self::new(&w * &self.matrix * w.adjoint(), self.m, self.n)
    }
}

fn check_unitary(u: &ComplexMatrix, dim: usize) -> Result<()> {
    if !u.is_square() || u.rows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: u.rows() });
    }
    let defect = u.unitarity_defect();
    if defect > tol::UNITARY {
        return Err(Error::NotUnitary { deviation: defect });
    }
    Ok(())
}

/// Schmidt weights `s_i` of a pure state `Σ √s_i |α_i⟩|β_i⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtForm {
    coefficients: Vec<f64>,
    dim_a: usize,
    dim_b: usize,
}

impl SchmidtForm {
    pub fn new(coefficients: Vec<f64>, dim_a: usize, dim_b: usize) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidSchmidt("no coefficients"));
        }
        if coefficients.len() > dim_a.min(dim_b) {
            return Err(Error::InvalidSchmidt("more coefficients than min(dim_a, dim_b)"));
        }
        if coefficients.iter().any(|&s| s.is_nan() || s < 0.0) {
            return Err(Error::InvalidSchmidt("negative or NaN coefficient"));
        }
        let total: f64 = coefficients.iter().sum();
        if (total - 1.0).abs() > tol::SCHMIDT {
            return Err(Error::InvalidSchmidt("coefficients do not sum to 1"));
        }
        Ok(Self { coefficients, dim_a, dim_b })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }
}

/// Projector onto `Σ_i √s_i (U_a|i⟩) ⊗ (U_b|i⟩)`; `None` means identity.
pub fn pure_from_schmidt(
    s: &SchmidtForm,
    u_a: Option<&ComplexMatrix>,
    u_b: Option<&ComplexMatrix>,
) -> Result<DensityMatrix> {
    let (da, db) = s.dims();
    if let Some(u) = u_a {
        check_unitary(u, da)?;
    }
    if let Some(u) = u_b {
        check_unitary(u, db)?;
    }
    let column = |u: Option<&ComplexMatrix>, dim: usize, i: usize| -> Vec<Complex64> {
        match u {
            Some(u) => u.column(i),
            None => (0..dim).map(|k| if k == i { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect(),
        }
    };
    let mut psi = alloc::vec![c(0.0, 0.0); da * db];
    for (i, &si) in s.coefficients().iter().enumerate() {
        let alpha = column(u_a, da, i);
        let beta = column(u_b, db, i);
        let w = si.sqrt();
        for (a, &x) in alpha.iter().enumerate() {
            for (b, &y) in beta.iter().enumerate() {
                psi[a * db + b] += x * y * w;
            }
        }
    }
    DensityMatrix::new(ComplexMatrix::outer(&psi, &psi), da, db)
}

/// Eigenvalues of the Bell-diagonal state with correlations `c`, paired
/// with `|Φ⁺⟩, |Φ⁻⟩, |Ψ⁺⟩, |Ψ⁻⟩` in that order.
pub fn bell_diagonal_eigenvalues(cs: [f64; 3]) -> [f64; 4] {
    let [c1, c2, c3] = cs;
    [
        0.25 * (1.0 + c1 - c2 + c3),
        0.25 * (1.0 - c1 + c2 + c3),
        0.25 * (1.0 + c1 + c2 - c3),
        0.25 * (1.0 - c1 - c2 - c3),
    ]
}

/// `¼(I⊗I + Σ c_i σ_i⊗σ_i)`.
pub fn bell_diagonal(cs: [f64; 3]) -> Result<DensityMatrix> {
    let min = bell_diagonal_eigenvalues(cs).into_iter().fold(f64::INFINITY, f64::min);
    if min.is_nan() || min < -tol::PSD_CLIP {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let [c1, c2, c3] = cs;
    let z = c(0.0, 0.0);
    let r = |x: f64| c(x * 0.25, 0.0);
    // σx⊗σx, σy⊗σy and σz⊗σz written out in the computational basis
    let entries = [
        r(1.0 + c3), z, z, r(c1 - c2),
        z, r(1.0 - c3), r(c1 + c2), z,
        z, r(c1 + c2), r(1.0 - c3), z,
        r(c1 - c2), z, z, r(1.0 + c3),
    ];
    DensityMatrix::new(ComplexMatrix::from_row_slice(4, 4, &entries), 2, 2)
}

/// `|φ⟩ = Σ_i |ii⟩/√n`.
pub fn maximally_entangled(n: usize) -> Vec<Complex64> {
    let w = 1.0 / (n as f64).sqrt();
    (0..n * n).map(|k| if k / n == k % n { c(w, 0.0) } else { c(0.0, 0.0) }).collect()
}

/// `Σ_αβ |α⟩⟨β| ⊗ |β⟩⟨α|`.
pub fn flip_operator(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, s| {
        let (a, b) = (r / d, r % d);
        if s == b * d + a {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Isotropic state with singlet fraction `x ∈ [0, 1]`.
pub fn isotropic(n: usize, x: f64) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { name: "isotropic x", value: x });
    }
    let nn = (n * n) as f64;
    let phi = maximally_entangled(n);
    let proj = ComplexMatrix::outer(&phi, &phi);
    let mat = ComplexMatrix::identity(n * n).scale((1.0 - x) / (nn - 1.0)) + proj.scale((nn * x - 1.0) / (nn - 1.0));
    DensityMatrix::new(mat, n, n)
}

/// Werner state with `tr(ρF) = x ∈ [−1, 1]`.
pub fn werner(d: usize, x: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { name: "werner x", value: x });
    }
    let df = d as f64;
    let norm = df * df * df - df;
    let mat = ComplexMatrix::identity(d * d).scale((df - x) / norm) + flip_operator(d).scale((x * df - 1.0) / norm);
    DensityMatrix::new(mat, d, d)
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    })
}

/// Ginibre state `GG†/tr(GG†)` with `G` an `mn × rank` complex Gaussian matrix.
pub fn random_density_with<R: Rng + ?Sized>(m: usize, n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > m * n {
        return Err(Error::InvalidRank { rank, max: m * n });
    }
    let g = gaussian_matrix(m * n, rank, rng);
    let gg = &g * g.adjoint();
    let t = gg.trace().re;
    DensityMatrix::new(gg.scale(1.0 / t), m, n)
}

/// [`random_density_with`] driven by a ChaCha8 generator seeded with `seed`.
pub fn random_density(m: usize, n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(m, n, rank, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Haar-random unitary (QR of a Ginibre matrix with the phases of `R` removed).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(d, d, rng).into_inner();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let z = r[(i, i)];
            if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) }
        } else {
            c(0.0, 0.0)
        }
    });
    ComplexMatrix::from_inner(q * phases)
}

/// Random Schmidt weights (`count` of them, uniform on the simplex).
pub fn random_schmidt<R: Rng + ?Sized>(count: usize, dim_a: usize, dim_b: usize, rng: &mut R) -> Result<SchmidtForm> {
    let raw: Vec<f64> = (0..count).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let total: f64 = raw.iter().sum();
    let mut s: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // renormalize the last entry so the sum is 1 to the last ulp
    let head: f64 = s[..count - 1].iter().sum();
    s[count - 1] = (1.0 - head).max(0.0);
    SchmidtForm::new(s, dim_a, dim_b)
}

/// `ρ^{ab} ⊗ σ^c`, regrouped as a state on `C^m ⊗ C^{nk}`.
pub fn attach_ancilla(rho: &DensityMatrix, sigma_c: &ComplexMatrix) -> Result<DensityMatrix> {
    validate_density(sigma_c)?;
    let (m, n) = rho.dims();
    DensityMatrix::new(kron(rho.matrix(), sigma_c), m, n * sigma_c.rows())
}

/// `ρ_a ⊗ ρ_b`.
pub fn product_state(rho_a: &ComplexMatrix, rho_b: &ComplexMatrix) -> Result<DensityMatrix> {
    validate_density(rho_a)?;
    validate_density(rho_b)?;
    DensityMatrix::new(kron(rho_a, rho_b), rho_a.rows(), rho_b.rows())
}

/// Applies the local filter `F = (ρ_a)^{-1/2}/√m` on `a`, which maps the
/// `a` marginal to `I/m` while keeping the state valid. Requires a full-rank
/// marginal.
pub fn filter_to_maximally_mixed_marginal(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let (m, n) = rho.dims();
    let spec = herm_eig(&rho.marginal(Subsystem::A))?;
    if spec.min() <= tol::PSD_CLIP {
        return Err(Error::NotPsd { min_eigenvalue: spec.min() });
    }
    let f = spec.map(|l| c(1.0 / (l * m as f64).sqrt(), 0.0));
    let fi = kron(&f, &ComplexMatrix::identity(n));
    let out = &fi * rho.matrix() * fi.adjoint();
    let t = out.trace().re;
    DensityMatrix::new(out.scale(1.0 / t).hermitian_part(), m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_product;
    use alloc::vec;

    fn bell_phi_plus() -> ComplexMatrix {
        let phi = maximally_entangled(2);
        ComplexMatrix::outer(&phi, &phi)
    }

    fn singlet() -> ComplexMatrix {
        let s = 1.0 / 2f64.sqrt();
        let psi = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)];
        ComplexMatrix::outer(&psi, &psi)
    }

    #[test]
    fn validation_rejects_each_violation() {
        let mut m = ComplexMatrix::identity(4).scale(0.25);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m, 2, 2), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::identity(4), 2, 2),
            Err(Error::InvalidTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::from_diagonal(&[1.5, -0.5, 0.0, 0.0]), 2, 2),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::identity(4).scale(0.25), 2, 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn schmidt_product_and_bell() {
        let prod = pure_from_schmidt(&SchmidtForm::new(vec![1.0, 0.0], 2, 2).unwrap(), None, None).unwrap();
        assert!((prod.matrix() - &ComplexMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0])).hs_norm() < 1e-15);
        let bell = pure_from_schmidt(&SchmidtForm::new(vec![0.5, 0.5], 2, 2).unwrap(), None, None).unwrap();
        assert!((bell.matrix() - &bell_phi_plus()).hs_norm() < 1e-15);
    }

    #[test]
    fn schmidt_marginal_spectrum_with_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ua = random_unitary(2, &mut rng);
        let ub = random_unitary(3, &mut rng);
        let s = SchmidtForm::new(vec![0.7, 0.3], 2, 3).unwrap();
        let rho = pure_from_schmidt(&s, Some(&ua), Some(&ub)).unwrap();
        let spec = herm_eig(&rho.marginal(Subsystem::A)).unwrap();
        assert!((spec.eigenvalues[0] - 0.3).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - 0.7).abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_validation() {
        assert!(SchmidtForm::new(vec![0.5, 0.6], 2, 2).is_err());
        assert!(SchmidtForm::new(vec![0.5, 0.25, 0.25], 2, 3).is_err());
        assert!(SchmidtForm::new(vec![1.5, -0.5], 2, 2).is_err());
        let not_unitary = ComplexMatrix::identity(2).scale(2.0);
        let s = SchmidtForm::new(vec![1.0], 2, 2).unwrap();
        assert!(matches!(pure_from_schmidt(&s, Some(&not_unitary), None), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn bell_diagonal_examples() {
        let mixed = bell_diagonal([0.0, 0.0, 0.0]).unwrap();
        assert!((mixed.matrix() - &ComplexMatrix::identity(4).scale(0.25)).hs_norm() < 1e-15);
        let s = bell_diagonal([-1.0, -1.0, -1.0]).unwrap();
        assert!((s.matrix() - &singlet()).hs_norm() < 1e-15);
        let spec = s.spectrum().unwrap();
        assert!((spec.eigenvalues[3] - 1.0).abs() < 1e-14 && spec.eigenvalues[2].abs() < 1e-14);
        assert!(matches!(bell_diagonal([1.0, 1.0, 1.0]), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn bell_diagonal_eigenvalue_pattern() {
        let cs = [0.5, -0.5, 0.5];
        let mut want = bell_diagonal_eigenvalues(cs).to_vec();
        want.sort_by(f64::total_cmp);
        let got = bell_diagonal(cs).unwrap().spectrum().unwrap().eigenvalues;
        for (a, b) in got.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn bell_diagonal_marginals_are_maximally_mixed() {
        let rho = bell_diagonal([0.2, -0.4, 0.1]).unwrap();
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!((rho.marginal(Subsystem::A) - &half).hs_norm() < 1e-12);
        assert!((rho.marginal(Subsystem::B) - &half).hs_norm() < 1e-12);
    }

    #[test]
    fn isotropic_examples() {
        let mixed = isotropic(2, 0.25).unwrap();
        assert!((mixed.matrix() - &ComplexMatrix::identity(4).scale(0.25)).hs_norm() < 1e-15);
        assert!((isotropic(2, 1.0).unwrap().matrix() - &bell_phi_plus()).hs_norm() < 1e-15);
        let rho = isotropic(3, 0.6).unwrap();
        let phi = maximally_entangled(3);
        let fid = trace_product(rho.matrix(), &ComplexMatrix::outer(&phi, &phi)).re;
        assert!((fid - 0.6).abs() < 1e-14);
        assert!(isotropic(2, 1.5).is_err());
    }

    #[test]
    fn werner_examples() {
        let mixed = werner(2, 0.5).unwrap();
        assert!((mixed.matrix() - &ComplexMatrix::identity(4).scale(0.25)).hs_norm() < 1e-15);
        assert!((werner(2, -1.0).unwrap().matrix() - &singlet()).hs_norm() < 1e-14);
        let rho = werner(3, 0.0).unwrap();
        assert!(trace_product(rho.matrix(), &flip_operator(3)).norm() < 1e-14);
        assert!(werner(2, -1.5).is_err());
    }

    #[test]
    fn families_are_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [2usize, 3] {
            let u = random_unitary(n, &mut rng);
            let uc = ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)].conj());
            let iso = isotropic(n, 0.7).unwrap();
            assert!((iso.local_unitary(&u, &uc).unwrap().matrix() - iso.matrix()).hs_norm() < 1e-9);
            let w = werner(n, -0.3).unwrap();
            assert!((w.local_unitary(&u, &u).unwrap().matrix() - w.matrix()).hs_norm() < 1e-9);
        }
    }

    #[test]
    fn random_density_properties() {
        let pure = random_density(2, 3, 1, 5).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        assert_eq!(random_density(2, 2, 2, 9).unwrap(), random_density(2, 2, 2, 9).unwrap());
        let full = random_density(2, 3, 6, 1).unwrap();
        assert!(full.spectrum().unwrap().min() > 0.0);
        assert!(matches!(random_density(2, 2, 5, 1), Err(Error::InvalidRank { .. })));
        assert!(matches!(random_density(2, 2, 0, 1), Err(Error::InvalidRank { .. })));
    }

    #[test]
    fn ancilla_examples() {
        let rho = random_density(2, 2, 3, 4).unwrap();
        let trivial = attach_ancilla(&rho, &ComplexMatrix::identity(1)).unwrap();
        assert_eq!(trivial.dims(), (2, 2));
        assert!((trivial.matrix() - rho.matrix()).hs_norm() < 1e-15);

        let bell = isotropic(2, 1.0).unwrap();
        let big = attach_ancilla(&bell, &ComplexMatrix::identity(2).scale(0.5)).unwrap();
        assert_eq!(big.dims(), (2, 4));
        assert!((big.marginal(Subsystem::A) - bell.marginal(Subsystem::A)).hs_norm() < 1e-14);

        let sigma = random_density(3, 1, 2, 8).unwrap();
        let joined = attach_ancilla(&rho, sigma.matrix()).unwrap();
        let sigma_purity = trace_product(sigma.matrix(), sigma.matrix()).re;
        assert!((joined.purity() - rho.purity() * sigma_purity).abs() < 1e-12);
    }

    #[test]
    fn filtering_yields_maximally_mixed_marginal() {
        for seed in 0..5 {
            let rho = random_density(2, 3, 3, seed).unwrap();
            let f = filter_to_maximally_mixed_marginal(&rho).unwrap();
            let half = ComplexMatrix::identity(2).scale(0.5);
            assert!((f.marginal(Subsystem::A) - &half).hs_norm() < 1e-12);
        }
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..5 {
            assert!(random_unitary(d, &mut rng).unitarity_defect() < 1e-12);
        }
    }
}
