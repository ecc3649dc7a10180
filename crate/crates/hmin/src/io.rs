//! State files and CSV output.

use std::fmt::Write as _;
use std::path::Path;

use hmin_core::{Complex64, ComplexMatrix, DensityMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk state: `{"m", "n", "matrix": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub m: usize,
    pub n: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let (m, n) = rho.dims();
        let mat = rho.matrix();
        let matrix = (0..mat.rows())
            .map(|i| (0..mat.cols()).map(|j| [mat[(i, j)].re, mat[(i, j)].im]).collect())
            .collect();
        Self { m, n, matrix }
    }

    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        let d = self.m * self.n;
        if self.m == 0 || self.n == 0 {
            return Err(CliError::input("state dimensions m and n must be positive"));
        }
        if self.matrix.len() != d || self.matrix.iter().any(|row| row.len() != d) {
            return Err(CliError::input(format!("matrix must be {d}x{d} for m = {}, n = {}", self.m, self.n)));
        }
        if self.matrix.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::input("matrix entries must be finite"));
        }
        let mat = ComplexMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.matrix[i][j];
            Complex64::new(re, im)
        });
        DensityMatrix::new(mat, self.m, self.n).map_err(|e| CliError::input(format!("invalid state: {e}")))
    }
}

pub fn read_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("cannot parse {}: {e}", path.display())))?;
    file.to_density()
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&StateFile::from_density(rho)).expect("state serializes");
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// C's `%.12g`.
pub fn fmt_g12(v: f64) -> String {
    const PRECISION: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rows of numbers under a header, `%.12g` formatted, LF line endings.
pub fn csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_g12(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (0.5, "0.5"),
            (1.0, "1"),
            (1.0 / 3.0, "0.333333333333"),
            (1.0 / 6.0, "0.166666666667"),
            (2.0 / 3.0, "0.666666666667"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (1e-5, "1e-05"),
            (0.0001234, "0.0001234"),
            (-2.5e-7, "-2.5e-07"),
            (0.061932, "0.061932"),
            (100.0, "100"),
            (0.0, "0"),
            (9.9999999999995, "10"),
            (1e100, "1e+100"),
        ];
        for (v, want) in cases {
            assert_eq!(fmt_g12(v), want, "{v:e}");
        }
    }

    #[test]
    fn csv_layout() {
        let text = csv(&["param".into(), "h_min".into()], &[vec![0.0, 0.5], vec![1.0, 1.0 / 3.0]]);
        assert_eq!(text, "param,h_min\n0,0.5\n1,0.333333333333\n");
    }

    #[test]
    fn state_round_trip() {
        let rho = hmin_core::states::random_density(2, 3, 2, 4).unwrap();
        let file = StateFile::from_density(&rho);
        let json = serde_json::to_string(&file).unwrap();
        let back: StateFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_density().unwrap().matrix(), rho.matrix());
    }

    #[test]
    fn invalid_states_name_the_violation() {
        let bad = StateFile { m: 2, n: 1, matrix: vec![vec![[1.2, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [-0.2, 0.0]]] };
        let err = bad.to_density().unwrap_err();
        assert!(err.to_string().contains("positive semidefinite"), "{err}");
        let bad = StateFile { m: 2, n: 2, matrix: vec![vec![[1.0, 0.0]]] };
        assert!(bad.to_density().unwrap_err().to_string().contains("4x4"));
    }
}
