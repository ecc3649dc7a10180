//! Dense complex linear algebra for operators on small bipartite spaces.
//!
//! [`ComplexMatrix`] wraps an `nalgebra` matrix so that the rest of the
//! crate speaks in terms of operators (adjoints, traces, Hilbert-Schmidt
//! products, partial traces) rather than storage. Computational kets of a
//! bipartite space are ordered `|ij⟩ = |i⟩_a ⊗ |j⟩_b`, `a`-major.

use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // redundant when another crate in the build links std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A dense complex matrix with at least one row and one column.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "matrix must be at least 1x1");
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Complex64]) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows * cols");
        Self(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn from_inner(inner: DMatrix<Complex64>) -> Self {
        assert!(inner.nrows() >= 1 && inner.ncols() >= 1, "matrix must be at least 1x1");
        Self(inner)
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diagonal().iter().copied().fold(ZERO, |acc, z| acc + z)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    /// Hilbert-Schmidt (Frobenius) norm `√tr(A†A)`.
    pub fn hs_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A − A†‖`, zero for Hermitian input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.0[(i, j)] - self.0[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `‖U†U − I‖` for a square matrix.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self.adjoint() * self - Self::identity(self.rows())).hs_norm()
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Complex64) -> ComplexMatrix {
        ComplexMatrix(self.0.map(|z| z * rhs))
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V f(Λ) V†`.
    pub fn map(&self, mut f: impl FnMut(f64) -> Complex64) -> ComplexMatrix {
        let v = self.eigenvectors.inner();
        let n = v.nrows();
        let values: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = DMatrix::from_fn(n, n, |i, k| v[(i, k)] * values[k]);
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| Complex64::new(l, 0.0))
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.rows(), found: h.cols() });
    }
    let defect = h.hermiticity_defect();
    if defect > tol::HERMITIAN * h.hs_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation: defect });
    }
    Ok(())
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn herm_eig(h: &ComplexMatrix) -> Result<Spectrum> {
    check_hermitian(h)?;
    let n = h.rows();
    let eig = SymmetricEigen::try_new(h.hermitian_part().into_inner(), f64::EPSILON, 1000 * n)
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(Spectrum { eigenvalues, eigenvectors: ComplexMatrix(eigenvectors) })
}

/// Clips round-off negatives and sub-noise eigenvalues of a PSD spectrum.
pub(crate) fn clip_psd_eigenvalues(spec: &mut Spectrum) -> Result<()> {
    let min = spec.min();
    if min < -tol::PSD_CLIP {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let floor = tol::EIGEN_NOISE * spec.max().max(1.0);
    for l in spec.eigenvalues.iter_mut() {
        if *l < floor {
            *l = 0.0;
        }
    }
    Ok(())
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut spec = herm_eig(rho)?;
    clip_psd_eigenvalues(&mut spec)?;
    Ok(spec.map(|l| Complex64::new(l.sqrt(), 0.0)).hermitian_part())
}

/// `exp(iH)` for Hermitian `H`.
pub fn expm_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = herm_eig(h)?;
    Ok(spec.map(|l| Complex64::new(l.cos(), l.sin())))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Which factor of `C^m ⊗ C^n` to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Traces out one factor of an operator on `C^m ⊗ C^n`.
pub fn partial_trace(m_op: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    let (m, n) = dims;
    if !m_op.is_square() || m_op.rows() != m * n {
        return Err(Error::DimensionMismatch { expected: m * n, found: m_op.rows() });
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(m, m, |i, k| {
            (0..n).fold(ZERO, |acc, j| acc + m_op[(i * n + j, k * n + j)])
        }),
        Subsystem::B => ComplexMatrix::from_fn(n, n, |j, l| {
            (0..m).fold(ZERO, |acc, i| acc + m_op[(i * n + j, i * n + l)])
        }),
    })
}

/// `tr(A†B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch { expected: a.rows() * a.cols(), found: b.rows() * b.cols() });
    }
    Ok(a.0.iter().zip(b.0.iter()).fold(ZERO, |acc, (x, y)| acc + x.conj() * y))
}

/// `tr(AB)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    debug_assert_eq!(a.cols(), b.rows());
    debug_assert_eq!(a.rows(), b.cols());
    let mut acc = ZERO;
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn real_symmetric_eigenvalues(s: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(Error::DimensionMismatch { expected: n, found: s.ncols() });
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n).ok_or(Error::NoConvergence)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
