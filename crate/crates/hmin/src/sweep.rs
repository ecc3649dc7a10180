//! One-parameter sweeps over the Bell-diagonal, isotropic and Werner families.

use std::fmt;
use std::str::FromStr;

use hmin_core::measures::{h_min_bell_diagonal, h_min_isotropic, h_min_werner, measure};
use hmin_core::states::{bell_diagonal, isotropic, werner};
use hmin_core::{DensityMatrix, MeasureKind, MeasureOptions};

use crate::{io, map_in_order, CliError, ErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `c_i = −c` for all three correlations, `c ∈ [−1/3, 1]`.
    BellDiagonal,
    /// Singlet fraction `x ∈ [0, 1]`.
    Isotropic,
    /// `tr(ρF) = x ∈ [−1, 1]`.
    Werner,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::BellDiagonal => "bell_diagonal",
            Family::Isotropic => "isotropic",
            Family::Werner => "werner",
        }
    }

    pub fn range(self) -> (f64, f64) {
        match self {
            Family::BellDiagonal => (-1.0 / 3.0, 1.0),
            Family::Isotropic => (0.0, 1.0),
            Family::Werner => (-1.0, 1.0),
        }
    }

    pub fn state(self, dim: usize, param: f64) -> Result<DensityMatrix, CliError> {
        Ok(match self {
            Family::BellDiagonal => bell_diagonal([-param; 3])?,
            Family::Isotropic => isotropic(dim, param)?,
            Family::Werner => werner(dim, param)?,
        })
    }

    /// The family's closed-form H-MIN.
    pub fn formula(self, dim: usize, param: f64) -> Result<f64, CliError> {
        Ok(match self {
            Family::BellDiagonal => h_min_bell_diagonal([-param; 3])?,
            Family::Isotropic => h_min_isotropic(dim, param)?,
            Family::Werner => h_min_werner(dim, param)?,
        })
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "bell_diagonal" => Ok(Family::BellDiagonal),
            "isotropic" => Ok(Family::Isotropic),
            "werner" => Ok(Family::Werner),
            _ => Err(CliError::input(format!("unknown family {s:?} (bell_diagonal, isotropic, werner)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sweep column: a measure, or the family's closed form (`h_min_formula`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Measure(MeasureKind),
    Formula,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::Measure(k) => k.name(),
            Column::Formula => "h_min_formula",
        }
    }
}

impl FromStr for Column {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "h_min_formula" {
            return Ok(Column::Formula);
        }
        s.parse::<MeasureKind>().map(Column::Measure).map_err(|_| {
            let names: Vec<&str> = MeasureKind::ALL.iter().map(|k| k.name()).collect();
            CliError::input(format!("unknown measure {s:?} (known: {}, h_min_formula)", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: Family,
    /// `n` for isotropic, `d` for Werner; always 2 for Bell-diagonal.
    pub dim: usize,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub columns: Vec<Column>,
    /// Multiply every measure column by 2.
    pub scale_by_two: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.steps < 2 {
            return Err(CliError::input("steps must be at least 2"));
        }
        if self.columns.is_empty() {
            return Err(CliError::input("no measures requested"));
        }
        if self.family == Family::BellDiagonal && self.dim != 2 {
            return Err(CliError::input("bell_diagonal states are 2x2; use --dim 2"));
        }
        if self.dim < 2 {
            return Err(CliError::input("dimension must be at least 2"));
        }
        let (lo, hi) = self.family.range();
        for v in [self.start, self.stop] {
            if !v.is_finite() || v < lo - 1e-12 || v > hi + 1e-12 {
                return Err(CliError::input(format!(
                    "{} parameter {v} outside [{}, {}]",
                    self.family,
                    io::fmt_g12(lo),
                    io::fmt_g12(hi)
                )));
            }
        }
        Ok(())
    }

    /// Evenly spaced grid, endpoints included exactly and clamped to the
    /// family's range.
    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.family.range();
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                let v = if i == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last as f64
                };
                v.clamp(lo, hi)
            })
            .collect()
    }

    pub fn header(&self) -> Vec<String> {
        std::iter::once("param".to_string()).chain(self.columns.iter().map(|c| c.name().to_string())).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Grid parameters whose optimizer runs did not converge.
    pub unconverged: Vec<f64>,
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        io::csv(&self.header, &self.rows)
    }
}

pub fn run_sweep(spec: &SweepSpec, opts: &MeasureOptions, jobs: Option<usize>) -> Result<SweepOutput, CliError> {
    spec.validate()?;
    let scale = if spec.scale_by_two { 2.0 } else { 1.0 };
    let grid = spec.grid();
    let results = map_in_order(&grid, jobs, |&param| -> Result<(Vec<f64>, bool), CliError> {
        let rho = spec.family.state(spec.dim, param)?;
        let mut row = vec![param];
        let mut converged = true;
        for column in &spec.columns {
            let value = match *column {
                Column::Formula => spec.family.formula(spec.dim, param)?,
                Column::Measure(kind) => {
                    if kind == MeasureKind::WeakHMin && rho.dims().0 != 2 {
                        return Err(CliError::input("weak_h_min needs a qubit subsystem a"));
                    }
                    let report = measure(kind, &rho, opts)?;
                    converged &= report.converged();
                    report.value
                }
            };
            row.push(scale * value);
        }
        Ok((row, converged))
    })?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut unconverged = Vec::new();
    for (param, result) in grid.iter().zip(results) {
        let (row, converged) = result?;
        if !converged {
            unconverged.push(*param);
        }
        rows.push(row);
    }
    Ok(SweepOutput { header: spec.header(), rows, unconverged })
}

/// Error for sweeps that finished with unconverged optimizer runs.
pub fn unconverged_error(params: &[f64]) -> CliError {
    let list: Vec<String> = params.iter().map(|&p| io::fmt_g12(p)).collect();
    CliError { kind: ErrorKind::Unconverged, message: format!("optimizer did not converge at param {}", list.join(", ")) }
}
