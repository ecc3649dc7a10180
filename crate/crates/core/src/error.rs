use thiserror::Error;

/// Errors raised by the numerical kernel and the measure routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is not 1 (got {trace})")]
    InvalidTrace { trace: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0} (need at least 2)")]
    InvalidDimension(usize),

    #[error("operation requires subsystem a of dimension 2, found {0}")]
    WrongDimension(usize),

    #[error("invalid Schmidt coefficients: {0}")]
    InvalidSchmidt(&'static str),

    #[error("rank {rank} outside 1..={max}")]
    InvalidRank { rank: usize, max: usize },

    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("imaginary residue {residue:.3e} in correlation coefficient")]
    ImaginaryResidue { residue: f64 },

    #[error("projectors do not form a von Neumann measurement: {0}")]
    InvalidMeasurement(&'static str),

    #[error("{name} closed form returned {value:.3e} < 0")]
    NegativeFormula { name: &'static str, value: f64 },

    #[error("evaluation budget must be at least 1")]
    InvalidBudget,
}

pub type Result<T> = core::result::Result<T, Error>;
