//! `H⁰_n` curves for sequential weak measurements.

use hmin_core::measures::{h_min_optimized, seq_distance};
use hmin_core::{DensityMatrix, OptimizerConfig, ProjectiveMeasurement};

use crate::{io, CliError, ErrorKind};

#[derive(Debug, Clone)]
pub struct SeqWeakOutput {
    /// `(x, n, H⁰_n)`.
    pub rows: Vec<[f64; 3]>,
    /// The measurement used: the one attaining H-MIN.
    pub measurement: ProjectiveMeasurement,
    pub converged: bool,
}

impl SeqWeakOutput {
    pub fn to_csv(&self) -> String {
        let header = ["x".to_string(), "n".to_string(), "H0n".to_string()];
        let rows: Vec<Vec<f64>> = self.rows.iter().map(|r| r.to_vec()).collect();
        io::csv(&header, &rows)
    }
}

/// `H⁰_n = ‖√ρ − ρ_n‖²` for every strength in `xs` and `n = 0..=n_max`,
/// using the invariant measurement that attains H-MIN, so `H⁰_n → N_H`.
pub fn seqweak(rho: &DensityMatrix, xs: &[f64], n_max: u32, config: &OptimizerConfig) -> Result<SeqWeakOutput, CliError> {
    if xs.is_empty() {
        return Err(CliError::input("no strengths given"));
    }
    if let Some(x) = xs.iter().find(|x| !x.is_finite() || **x <= 0.0) {
        return Err(CliError::input(format!("strength x = {x} must be positive")));
    }
    if n_max < 1 {
        return Err(CliError::input("n-max must be at least 1"));
    }
    let opt = h_min_optimized(rho, config)?;
    let p = opt.best_measurement;
    let mut rows = Vec::with_capacity(xs.len() * (n_max as usize + 1));
    for &x in xs {
        for n in 0..=n_max {
            let d = seq_distance(rho, &p, x, 0, n)?;
            rows.push([x, n as f64, d.direct]);
        }
    }
    Ok(SeqWeakOutput { rows, measurement: p, converged: opt.converged })
}

pub fn unconverged_error() -> CliError {
    CliError { kind: ErrorKind::Unconverged, message: "optimizer did not converge while choosing the measurement".into() }
}
