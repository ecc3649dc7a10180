//! File formats, sweeps and the verification battery behind the `hmin`
//! command-line tool.

use std::fmt;

pub mod io;
pub mod seqweak;
pub mod sweep;
pub mod verify;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or an invalid state file.
    Input,
    /// A verification check failed.
    Verification,
    /// An optimizer run ended without converging.
    Unconverged,
    /// Filesystem errors and numerical failures.
    Runtime,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Input, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Runtime, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Verification => 1,
            ErrorKind::Input => 2,
            ErrorKind::Unconverged => 3,
            ErrorKind::Runtime => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Library errors from user-supplied parameters count as input errors.
impl From<hmin_core::Error> for CliError {
    fn from(e: hmin_core::Error) -> Self {
        use hmin_core::Error as E;
        let kind = match e {
            E::NoConvergence | E::ImaginaryResidue { .. } | E::NegativeFormula { .. } => ErrorKind::Runtime,
            _ => ErrorKind::Input,
        };
        Self { kind, message: e.to_string() }
    }
}

/// Maps `f` over `items`, on `jobs` worker threads when given. Results keep
/// the input order either way.
pub fn map_in_order<T, R, F>(items: &[T], jobs: Option<usize>, f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match jobs {
        None => Ok(items.iter().map(f).collect()),
        Some(0) => Err(CliError::input("--jobs must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::io(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(|| items.par_iter().map(f).collect()))
        }
    }
}
