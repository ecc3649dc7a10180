//! Orthonormal Hermitian operator bases and correlation matrices.
//!
//! Any Hermitian `M` on `C^m ⊗ C^n` expands as `M = Σ_ij γ_ij X_i ⊗ Y_j`
//! with `γ_ij = tr(M X_i ⊗ Y_j)` real, where `{X_i}` and `{Y_j}` are
//! orthonormal Hermitian bases whose first element is `I/√m` (resp. `I/√n`).
//!
//! Indices here are zero-based: slot `0` is the identity element, which
//! mathematical texts usually call index `1`. The local vectors `x`, `y`
//! are stored as the raw coefficients `γ_i0`, `γ_0j`, so no extra `1/√m`,
//! `1/√n` factors appear and reconstruction is exact.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)] // redundant when another crate in the build links std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c, kron, trace_product, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::tol;

/// `m²` Hermitian matrices, orthonormal in the Hilbert-Schmidt product.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Generalized Gell-Mann matrices normalized to unit Hilbert-Schmidt norm.
///
/// Ordering: `I/√m`, then the symmetric family `(|j⟩⟨k| + |k⟩⟨j|)/√2`,
/// the antisymmetric family `(−i|j⟩⟨k| + i|k⟩⟨j|)/√2` (both over `j < k`
/// in lexicographic order), then the diagonal family
/// `(Σ_{j<l} |j⟩⟨j| − l|l⟩⟨l|)/√(l(l+1))` for `l = 1..m`. For `m = 2` this
/// is `{I, σ_x, σ_y, σ_z}/√2`.
pub fn gell_mann_basis(m: usize) -> Result<OperatorBasis> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    let mut elements = Vec::with_capacity(m * m);
    elements.push(ComplexMatrix::identity(m).scale(1.0 / (m as f64).sqrt()));

    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|j| (j + 1..m).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        let mut e = ComplexMatrix::zeros(m, m);
        e[(j, k)] = c(inv_sqrt2, 0.0);
        e[(k, j)] = c(inv_sqrt2, 0.0);
        elements.push(e);
    }
    for &(j, k) in &pairs {
        let mut e = ComplexMatrix::zeros(m, m);
        e[(j, k)] = c(0.0, -inv_sqrt2);
        e[(k, j)] = c(0.0, inv_sqrt2);
        elements.push(e);
    }
    for l in 1..m {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut e = ComplexMatrix::zeros(m, m);
        for j in 0..l {
            e[(j, j)] = c(norm, 0.0);
        }
        e[(l, l)] = c(-(l as f64) * norm, 0.0);
        elements.push(e);
    }
    Ok(OperatorBasis { dim: m, elements })
}

/// Real coefficient matrix `Γ` (`m² × n²`) of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct BlochDecomposition {
    m: usize,
    n: usize,
    gamma: DMatrix<f64>,
}

impl BlochDecomposition {
    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    /// Local coefficients on `a`: `γ_i0` for `i ≥ 1`.
    pub fn x(&self) -> DVector<f64> {
        self.gamma.view((1, 0), (self.m * self.m - 1, 1)).column(0).into_owned()
    }

    /// Local coefficients on `b`: `γ_0j` for `j ≥ 1`.
    pub fn y(&self) -> DVector<f64> {
        self.gamma.view((0, 1), (1, self.n * self.n - 1)).row(0).transpose()
    }

    /// Correlation block `γ_ij` for `i, j ≥ 1`.
    pub fn t(&self) -> DMatrix<f64> {
        self.gamma.view((1, 1), (self.m * self.m - 1, self.n * self.n - 1)).into_owned()
    }

    /// `ΓΓᵗ` (`m² × m²`).
    pub fn gram(&self) -> DMatrix<f64> {
        &self.gamma * self.gamma.transpose()
    }

    /// `Σ_ij γ_ij X_i ⊗ Y_j`.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let xa = gell_mann_basis(self.m)?;
        let yb = gell_mann_basis(self.n)?;
        let mut out = ComplexMatrix::zeros(self.m * self.n, self.m * self.n);
        for (i, xi) in xa.elements().iter().enumerate() {
            for (j, yj) in yb.elements().iter().enumerate() {
                let g = self.gamma[(i, j)];
                if g != 0.0 {
                    out += &kron(xi, yj).scale(g);
                }
            }
        }
        Ok(out)
    }
}

/// Expands a Hermitian operator on `C^m ⊗ C^n` in the Gell-Mann product basis.
pub fn bloch_decompose(op: &ComplexMatrix, m: usize, n: usize) -> Result<BlochDecomposition> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !op.is_square() || op.rows() != m * n {
        return Err(Error::DimensionMismatch { expected: m * n, found: op.rows() });
    }
    let defect = op.hermiticity_defect();
    if defect > tol::HERMITIAN * op.hs_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let xa = gell_mann_basis(m)?;
    let yb = gell_mann_basis(n)?;

    let mut gamma = DMatrix::zeros(m * m, n * n);
    let mut residue: f64 = 0.0;
    for (i, xi) in xa.elements().iter().enumerate() {
        // Z_i = tr_a(M (X_i ⊗ I)), an operator on b
        let z = ComplexMatrix::from_fn(n, n, |cc, d| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..m {
                for b in 0..m {
                    acc += op[(a * n + cc, b * n + d)] * xi[(b, a)];
                }
            }
            acc
        });
        for (j, yj) in yb.elements().iter().enumerate() {
            let g = trace_product(&z, yj);
            residue = residue.max(g.im.abs());
            gamma[(i, j)] = g.re;
        }
    }
    if residue > tol::IMAG_RESIDUE {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(BlochDecomposition { m, n, gamma })
}

/// Correlation matrix of `√ρ`.
pub fn gamma_of_sqrt(rho: &DensityMatrix) -> Result<BlochDecomposition> {
    let (m, n) = rho.dims();
    bloch_decompose(&rho.sqrt()?, m, n)
}
