//! Measurement-induced nonlocality measures and their closed forms.
//!
//! Every measure optimizes over von Neumann measurements on `a` that leave
//! `ρ^a` invariant. When `ρ^a` is nondegenerate that set is a single
//! measurement and no search runs.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;
#[allow(unused_imports)] // redundant when another crate in the build links std
use num_traits::Float;

use crate::basis::{bloch_decompose, gamma_of_sqrt};
use crate::error::{Error, Result};
use crate::linalg::{kron, psd_sqrt, real_symmetric_eigenvalues, trace_product, ComplexMatrix, Subsystem};
use crate::measurements::{apply_local_measurement, sequential_state, ProjectiveMeasurement, WeakScheme};
use crate::optimizer::{optimize_measurement, Goal, MeasurementParams, OptimizerConfig, OptimizerResult};
use crate::states::{bell_diagonal_eigenvalues, DensityMatrix, SchmidtForm};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MeasureKind {
    HsMin,
    HMin,
    HMinBound,
    SkewMin,
    AffinityMin,
    WeakHMin,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::HsMin,
        MeasureKind::HMin,
        MeasureKind::HMinBound,
        MeasureKind::SkewMin,
        MeasureKind::AffinityMin,
        MeasureKind::WeakHMin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::HsMin => "hs_min",
            MeasureKind::HMin => "h_min",
            MeasureKind::HMinBound => "h_min_bound",
            MeasureKind::SkewMin => "skew_min",
            MeasureKind::AffinityMin => "affinity_min",
            MeasureKind::WeakHMin => "weak_h_min",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(Error::InvalidMeasurement("unknown measure name"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    ClosedForm,
    Optimized,
    Both,
}

/// Summary of the optimizer run behind a reported value.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    pub params: MeasurementParams,
    /// Raw objective at the optimum (before any `1 − ·` transform).
    pub objective: f64,
    pub evaluations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub budget_exhausted: bool,
}

impl From<&OptimizerResult> for Certificate {
    fn from(r: &OptimizerResult) -> Self {
        Self {
            params: r.best_params.clone(),
            objective: r.best_value,
            evaluations: r.evaluations,
            restarts: r.restarts,
            converged: r.converged,
            budget_exhausted: r.budget_exhausted,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasureReport {
    pub kind: MeasureKind,
    pub value: f64,
    pub method: Method,
    pub certificate: Option<Certificate>,
    /// `|closed form − optimized|` when both ran.
    pub cross_check: Option<f64>,
    pub extras: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
}

impl MeasureReport {
    fn new(kind: MeasureKind, value: f64, method: Method) -> Result<Self> {
        Ok(Self {
            kind,
            value: clip_value(kind.name(), value)?,
            method,
            certificate: None,
            cross_check: None,
            extras: BTreeMap::new(),
            flags: BTreeMap::new(),
        })
    }

    fn extra(&mut self, key: &str, value: f64) {
        self.extras.insert(key.to_string(), value);
    }

    fn flag(&mut self, key: &str, value: bool) {
        self.flags.insert(key.to_string(), value);
    }

    /// False when an optimizer run behind the value stopped early.
    pub fn converged(&self) -> bool {
        self.certificate.as_ref().map_or(true, |c| c.converged)
    }

    /// Cross-check within [`tol::CROSS_CHECK`], or none was run.
    pub fn cross_check_passed(&self) -> bool {
        self.cross_check.map_or(true, |d| d <= tol::CROSS_CHECK)
    }
}

/// Zeroes round-off negatives; a genuinely negative value is an error.
fn clip_value(name: &'static str, value: f64) -> Result<f64> {
    if value.is_nan() || value < -tol::VALUE_CLIP {
        return Err(Error::NegativeFormula { name, value });
    }
    Ok(value.max(0.0))
}

#[derive(Clone, Debug)]
pub struct MeasureOptions {
    pub optimizer: OptimizerConfig,
    /// Also run the optimizer next to closed forms.
    pub cross_check: bool,
    /// Strength `x` used by [`MeasureKind::WeakHMin`].
    pub weak_strength: f64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { optimizer: OptimizerConfig::default(), cross_check: true, weak_strength: 1.0 }
    }
}

/// Computes one measure by name.
pub fn measure(kind: MeasureKind, rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureReport> {
    match kind {
        MeasureKind::HsMin => hs_min(rho, opts),
        MeasureKind::HMin => h_min(rho, opts),
        MeasureKind::HMinBound => MeasureReport::new(kind, h_min_upper_bound(rho)?, Method::ClosedForm),
        MeasureKind::SkewMin => skew_min(rho, opts),
        MeasureKind::AffinityMin => affinity_min(rho, opts),
        MeasureKind::WeakHMin => weak_h_min(rho, opts.weak_strength, opts),
    }
}

fn require_qubit(rho: &DensityMatrix) -> Result<(usize, usize)> {
    let (m, n) = rho.dims();
    if m != 2 {
        return Err(Error::WrongDimension(m));
    }
    Ok((m, n))
}

/// `tr(√ρ − √σ)²`.
pub fn hellinger_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let (a, b) = (rho.matrix().rows(), sigma.matrix().rows());
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    let diff = rho.sqrt()? - sigma.sqrt()?;
    Ok(diff.hs_norm().powi(2))
}

/// Bloch vector `r` of a qubit marginal `½(I + r·σ)`.
fn qubit_bloch_vector(marginal: &ComplexMatrix) -> [f64; 3] {
    let off = marginal[(0, 1)];
    [2.0 * off.re, -2.0 * off.im, (marginal[(0, 0)] - marginal[(1, 1)]).re]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `v̂ᵗ M v̂` over slots `1..=3` of a 4×4 Gram matrix.
fn quadratic_form(g: &DMatrix<f64>, v: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += v[i] * g[(i + 1, j + 1)] * v[j];
        }
    }
    s
}

fn trailing_block(g: &DMatrix<f64>) -> DMatrix<f64> {
    let k = g.nrows() - 1;
    g.view((1, 1), (k, k)).into_owned()
}

/// `‖ρ − Π^a(ρ)‖²` maximized over invariant measurements.
pub fn hs_min_optimized(rho: &DensityMatrix, config: &OptimizerConfig) -> Result<OptimizerResult> {
    let r = rho.matrix();
    optimize_measurement(
        |p| Ok((r - apply_local_measurement(r, p)?).hs_norm().powi(2)),
        rho.dims().0,
        Goal::Maximize,
        Some(&rho.marginal(Subsystem::A)),
        config,
    )
}

/// Hilbert-Schmidt MIN of a `2 × n` state from its correlation matrix:
/// `tr(TTᵗ) − x̂ᵗTTᵗx̂`, or `tr(TTᵗ) − λ_min(TTᵗ)` when the marginal is
/// maximally mixed.
pub fn hs_min_2xn(rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureReport> {
    let (m, n) = require_qubit(rho)?;
    let dec = bloch_decompose(rho.matrix(), m, n)?;
    let t = dec.t();
    let ttt = &t * t.transpose();
    let r = qubit_bloch_vector(&rho.marginal(Subsystem::A));
    let nr = norm3(r);
    let value = if nr > tol::DEGENERACY {
        let xhat = [r[0] / nr, r[1] / nr, r[2] / nr];
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                q += xhat[i] * ttt[(i, j)] * xhat[j];
            }
        }
        ttt.trace() - q
    } else {
        ttt.trace() - real_symmetric_eigenvalues(&ttt)?[0]
    };
    let mut report = MeasureReport::new(MeasureKind::HsMin, value, Method::ClosedForm)?;
    if opts.cross_check {
        let opt = hs_min_optimized(rho, &opts.optimizer)?;
        report.method = Method::Both;
        report.cross_check = Some((opt.best_value - value).abs());
        report.extra("optimized", opt.best_value);
        report.certificate = Some((&opt).into());
    }
    Ok(report)
}

/// Hilbert-Schmidt MIN: closed form for qubit `a`, optimizer otherwise.
pub fn hs_min(rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureReport> {
    if rho.dims().0 == 2 {
        return hs_min_2xn(rho, opts);
    }
    let opt = hs_min_optimized(rho, &opts.optimizer)?;
    let mut report = MeasureReport::new(MeasureKind::HsMin, opt.best_value, Method::Optimized)?;
    report.certificate = Some((&opt).into());
    Ok(report)
}

/// `min tr[√ρ Π^a(√ρ)]` over invariant measurements.
pub fn h_min_optimized(rho: &DensityMatrix, config: &OptimizerConfig) -> Result<OptimizerResult> {
    let s = rho.sqrt()?;
    optimize_measurement(
        |p| Ok(trace_product(&s, &apply_local_measurement(&s, p)?).re),
        rho.dims().0,
        Goal::Minimize,
        Some(&rho.marginal(Subsystem::A)),
        config,
    )
}

/// H-MIN `1 − min tr[√ρ Π^a(√ρ)]`. Qubit `a` uses the closed form with an
/// optimizer cross-check; larger `a` uses the optimizer.
pub fn h_min(rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureReport> {
    if rho.dims().0 == 2 {
        let mut report = h_min_2xn_closed(rho, opts)?;
        report.kind = MeasureKind::HMin;
        return Ok(report);
    }
    let opt = h_min_optimized(rho, &opts.optimizer)?;
    let mut report = MeasureReport::new(MeasureKind::HMin, 1.0 - opt.best_value, Method::Optimized)?;
    report.certificate = Some((&opt).into());
    Ok(report)
}

/// `1 − Σ s_i²` for a pure state with Schmidt weights `s_i`.
pub fn h_min_pure(s: &SchmidtForm) -> f64 {
    1.0 - s.coefficients().iter().map(|x| x * x).sum::<f64>()
}

/// `1 − Σ_{i<m} μ_i` over the `m − 1` smallest eigenvalues of `ΓΓᵗ`,
/// `Γ` the correlation matrix of `√ρ`. Never below H-MIN.
pub fn h_min_upper_bound(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.dims().0;
    let mu = real_symmetric_eigenvalues(&gamma_of_sqrt(rho)?.gram())?;
    Ok(1.0 - mu.iter().take(m - 1).sum::<f64>())
}

/// Closed-form H-MIN of a `2 × n` state.
///
/// With `G = ΓΓᵗ` for `√ρ` and `r` the Bloch vector of `ρ^a`, the value is
/// `1 − G₀₀ − r̂ᵗ G r̂` over the traceless slots. When `r = 0` every axis is
/// allowed and the minimum over `r̂` gives `tr C − λ_min(C)`, `C` the
/// traceless block of `G` (using `tr G = 1`). Two alternative readings of
/// that branch are kept in `extras` for comparison: `1 − μ_min(G)` and
/// `1 − λ_min(C)`. With cross-checking on, the reported value is whichever
/// of the three candidates sits closest to the optimizer.
pub fn h_min_2xn_closed(rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureReport> {
    require_qubit(rho)?;
    let g = gamma_of_sqrt(rho)?.gram();
    let r = qubit_bloch_vector(&rho.marginal(Subsystem::A));
    let nr = norm3(r);
    let degenerate = nr <= tol::DEGENERACY;
    let mut candidates: alloc::vec::Vec<(&str, f64)> = alloc::vec::Vec::new();
    let closed = if degenerate {
        let block = trailing_block(&g);
        let lambda = real_symmetric_eigenvalues(&block)?[0];
        let mu = real_symmetric_eigenvalues(&g)?[0];
        candidates.push(("restricted", 1.0 - g[(0, 0)] - lambda));
        candidates.push(("full_spectrum", 1.0 - mu));
        candidates.push(("block_only", 1.0 - lambda));
        candidates[0].1
    } else {
        let rhat = [r[0] / nr, r[1] / nr, r[2] / nr];
        1.0 - g[(0, 0)] - quadratic_form(&g, rhat)
    };

    let mut report = MeasureReport::new(MeasureKind::HMin, closed, Method::ClosedForm)?;
    for &(name, v) in &candidates {
        report.extra(name, v);
    }
    report.flag("degenerate_marginal", degenerate);
    if opts.cross_check {
        let opt = h_min_optimized(rho, &opts.optimizer)?;
        let optimized = 1.0 - opt.best_value;
        let mut value = closed;
        if degenerate {
            let (name, best) = candidates
                .iter()
                .copied()
                .min_by(|a, b| (a.1 - optimized).abs().total_cmp(&(b.1 - optimized).abs()))
                .expect("three candidates");
            value = best;
            for &(cand, v) in &candidates {
                report.flag(&alloc::format!("{cand}_matches"), (v - optimized).abs() <= tol::CROSS_CHECK);
            }
            report.flag(&alloc::format!("{name}_selected"), true);
        }
        report.value = clip_value("h_min", value)?;
        report.method = Method::Both;
        report.cross_check = Some((value - optimized).abs());
        report.extra("optimized", optimized);
        report.certificate = Some((&opt).into());
    }
    Ok(report)
}

/// Closed-form H-MIN of the Bell-diagonal state `¼(I + Σ c_i σ_i⊗σ_i)`:
/// `1 − (δ² + min d_i²)/4` with `δ = tr √ρ`.
pub fn h_min_bell_diagonal(cs: [f64; 3]) -> Result<f64> {
    let lambda = bell_diagonal_eigenvalues(cs);
    let min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    if min.is_nan() || min < -tol::PSD_CLIP {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let [a, b, c, d] = lambda.map(|l| l.max(0.0).sqrt());
    let delta = a + b + c + d;
    let ds = [a - b + c - d, -a + b + c - d, a + b - c - d];
    let dmin = ds.iter().map(|x| x * x).fold(f64::INFINITY, f64::min);
    clip_value("h_min_bell_diagonal", 1.0 - (delta * delta + dmin) / 4.0)
}

/// Closed-form H-MIN of the `n × n` isotropic state with singlet fraction `x`:
/// `(√((n − 1)x) − √((1 − x)/(n + 1)))² / n`.
pub fn h_min_isotropic(n: usize, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { name: "isotropic x", value: x });
    }
    let nf = n as f64;
    // √((n−1)x) − √((1−x)/(n+1)) rewritten as a quotient: no cancellation at the root
    let sum = ((nf - 1.0) * x).sqrt() + ((1.0 - x) / (nf + 1.0)).sqrt();
    let t = (nf * nf * x - 1.0) / ((nf + 1.0) * sum);
    Ok(t * t / nf)
}

/// Closed-form H-MIN of the `d × d` Werner state with `tr(ρF) = x`:
/// `½((d − x)/(d + 1) − √((d − 1)(1 − x²)/(d + 1)))`.
pub fn h_min_werner(d: usize, x: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { name: "werner x", value: x });
    }
    let df = d as f64;
    // ½(p − q) with p² − q² = (dx − 1)²/(d + 1)², evaluated without cancellation
    let p = (df - x) / (df + 1.0);
    let q = ((df - 1.0) / (df + 1.0) * (1.0 - x * x)).sqrt();
    let value = (df * x - 1.0).powi(2) / (2.0 * (df + 1.0).powi(2) * (p + q));
    clip_value("h_min_werner", value)
}

/// Weak-measurement H-MIN of strength `x`: `max ‖√ρ − Ω(√ρ)‖²` by direct
/// search, next to the scaling law `(1 − sech x)² N_H`.
pub fn weak_h_min(rho: &DensityMatrix, x: f64, opts: &MeasureOptions) -> Result<MeasureReport> {
    require_qubit(rho)?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::OutOfRange { name: "weak measurement strength", value: x });
    }
    let s = rho.sqrt()?;
    let opt = optimize_measurement(
        |p| {
            let w = WeakScheme::qubit(x, p)?;
            Ok((&s - crate::measurements::weak_apply(&s, &w)?).hs_norm().powi(2))
        },
        2,
        Goal::Maximize,
        Some(&rho.marginal(Subsystem::A)),
        &opts.optimizer,
    )?;
    let mut report = MeasureReport::new(MeasureKind::WeakHMin, opt.best_value, Method::Optimized)?;
    report.certificate = Some((&opt).into());
    report.extra("strength", x);
    if opts.cross_check {
        let nh = h_min(rho, opts)?;
        let tau = 1.0 / x.cosh();
        let scaled = (1.0 - tau).powi(2) * nh.value;
        report.method = Method::Both;
        report.cross_check = Some((scaled - opt.best_value).abs());
        report.extra("scaling_law", scaled);
        report.extra("h_min", nh.value);
    }
    Ok(report)
}

/// `H^m_n = ‖ρ_m − ρ_n‖²` between sequentially measured states, by two
/// routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeqDistance {
    /// From the sequential states themselves.
    pub direct: f64,
    /// `(τ^m − τ^n)² Σ_k I(ρ, Π_k ⊗ I)`.
    pub formula: f64,
}

pub fn seq_distance(
    rho: &DensityMatrix,
    p: &ProjectiveMeasurement,
    x: f64,
    m_steps: u32,
    n_steps: u32,
) -> Result<SeqDistance> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::OutOfRange { name: "weak measurement strength", value: x });
    }
    let (m, n) = rho.dims();
    if p.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, found: p.dim() });
    }
    let tau = 1.0 / x.cosh();
    let s = rho.sqrt()?;
    let direct = if tau < 1.0 {
        let a = sequential_state(&s, p, tau, m_steps)?;
        let b = sequential_state(&s, p, tau, n_steps)?;
        (a - b).hs_norm().powi(2)
    } else {
        0.0
    };
    let skew: f64 = p
        .lifted(n)
        .iter()
        .map(|k| skew_information_sqrt(&s, k))
        .sum();
    let weight = tau.powi(m_steps.min(i32::MAX as u32) as i32) - tau.powi(n_steps.min(i32::MAX as u32) as i32);
    Ok(SeqDistance { direct, formula: weight * weight * skew })
}

/// Wigner-Yanase skew information `−½ tr([√ρ, K]²)`.
pub fn skew_information(rho: &DensityMatrix, k: &ComplexMatrix) -> Result<f64> {
    let dim = rho.matrix().rows();
    if !k.is_square() || k.rows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: k.rows() });
    }
    let defect = k.hermiticity_defect();
    if defect > tol::HERMITIAN * k.hs_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation: defect });
    }
    Ok(skew_information_sqrt(&rho.sqrt()?, k))
}

fn skew_information_sqrt(s: &ComplexMatrix, k: &ComplexMatrix) -> f64 {
    let comm = s.commutator(k);
    -0.5 * trace_product(&comm, &comm).re
}

/// Skew-information MIN: `max Σ_k I(ρ, Π_k ⊗ I)` over invariant
/// measurements, searched on its own objective.
pub fn skew_min(rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureReport> {
    let (m, n) = rho.dims();
    let s = rho.sqrt()?;
    let id = ComplexMatrix::identity(n);
    let opt = optimize_measurement(
        |p| Ok(p.projectors().iter().map(|q| skew_information_sqrt(&s, &kron(q, &id))).sum()),
        m,
        Goal::Maximize,
        Some(&rho.marginal(Subsystem::A)),
        &opts.optimizer,
    )?;
    let mut report = MeasureReport::new(MeasureKind::SkewMin, opt.best_value, Method::Optimized)?;
    report.certificate = Some((&opt).into());
    if opts.cross_check {
        let nh = h_min(rho, opts)?;
        report.method = Method::Both;
        report.cross_check = Some((nh.value - report.value).abs());
        report.extra("h_min", nh.value);
    }
    Ok(report)
}

/// Affinity MIN `1 − min tr[√ρ √(Π^a(ρ))]`.
///
/// Flags `sqrt_commutes` when `Π^a(√ρ) = √(Π^a(ρ))` at the optimum, in which
/// case the value coincides with H-MIN at that measurement.
pub fn affinity_min(rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureReport> {
    let r = rho.matrix();
    let s = rho.sqrt()?;
    let opt = optimize_measurement(
        |p| Ok(trace_product(&s, &psd_sqrt(&apply_local_measurement(r, p)?)?).re),
        rho.dims().0,
        Goal::Minimize,
        Some(&rho.marginal(Subsystem::A)),
        &opts.optimizer,
    )?;
    let p = &opt.best_measurement;
    let measured_sqrt = apply_local_measurement(&s, p)?;
    let sqrt_measured = psd_sqrt(&apply_local_measurement(r, p)?)?;
    let gap = (&measured_sqrt - &sqrt_measured).hs_norm();
    let hellinger_here = 1.0 - trace_product(&s, &measured_sqrt).re;

    let mut report = MeasureReport::new(MeasureKind::AffinityMin, 1.0 - opt.best_value, Method::Optimized)?;
    report.certificate = Some((&opt).into());
    report.extra("sqrt_gap", gap);
    report.extra("h_min_at_optimum", hellinger_here);
    report.flag("sqrt_commutes", gap <= tol::AFFINITY_IDENTITY);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::states::{bell_diagonal, isotropic, product_state, pure_from_schmidt, random_density, werner};

    fn bell() -> DensityMatrix {
        bell_diagonal([1.0, -1.0, 1.0]).unwrap()
    }

    fn opts() -> MeasureOptions {
        MeasureOptions::default()
    }

    #[test]
    fn hellinger_examples() {
        let rho = random_density(2, 2, 4, 1).unwrap();
        assert!(hellinger_distance(&rho, &rho).unwrap().abs() < 1e-12);
        let zero = DensityMatrix::new(ComplexMatrix::from_diagonal(&[1.0, 0.0]), 2, 1).unwrap();
        let one = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.0, 1.0]), 2, 1).unwrap();
        assert!((hellinger_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-12);
        let sigma = random_density(2, 2, 3, 2).unwrap();
        let expansion = 2.0 - 2.0 * trace_product(&rho.sqrt().unwrap(), &sigma.sqrt().unwrap()).re;
        let d = hellinger_distance(&rho, &sigma).unwrap();
        assert!((d - expansion).abs() < 1e-12);
        assert!((d - hellinger_distance(&sigma, &rho).unwrap()).abs() < 1e-14);
        let big = random_density(2, 3, 2, 2).unwrap();
        assert!(hellinger_distance(&rho, &big).is_err());
    }

    #[test]
    fn hs_min_examples() {
        let r = hs_min_2xn(&bell(), &opts()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!(r.cross_check.unwrap() < 1e-6);
        let prod = product_state(
            random_density(2, 1, 2, 3).unwrap().matrix(),
            random_density(2, 1, 2, 4).unwrap().matrix(),
        )
        .unwrap();
        assert!(hs_min_2xn(&prod, &opts()).unwrap().value < 1e-12);
        // (0.8, 0.6, 0.4) lies outside the state tetrahedron; flip one sign
        assert!(bell_diagonal([0.8, 0.6, 0.4]).is_err());
        let r = hs_min_2xn(&bell_diagonal([0.8, -0.6, 0.4]).unwrap(), &opts()).unwrap();
        assert!(r.cross_check.unwrap() < 1e-6);
        // T = diag(c)/2: tr(TTᵗ) − λ_min = (0.64 + 0.36 + 0.16 − 0.16)/4
        assert!((r.value - 0.25).abs() < 1e-12);
        assert!(matches!(hs_min_2xn(&random_density(3, 2, 6, 1).unwrap(), &opts()), Err(Error::WrongDimension(3))));
    }

    #[test]
    fn h_min_examples() {
        let r = h_min(&bell(), &opts()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!(r.cross_check.unwrap() < 1e-6);
        let rho = random_density(2, 3, 2, 9).unwrap();
        let r = h_min(&rho, &opts()).unwrap();
        assert!(r.cross_check.unwrap() < 1e-6);
        assert!(r.value >= 0.0 && r.value < 1.0);
    }

    #[test]
    fn h_min_pure_examples() {
        assert_eq!(h_min_pure(&SchmidtForm::new(alloc::vec![1.0, 0.0], 2, 2).unwrap()), 0.0);
        assert_eq!(h_min_pure(&SchmidtForm::new(alloc::vec![0.5, 0.5], 2, 2).unwrap()), 0.5);
        let s = SchmidtForm::new(alloc::vec![0.7, 0.3], 2, 2).unwrap();
        assert!((h_min_pure(&s) - 0.42).abs() < 1e-15);
        let rho = pure_from_schmidt(&s, None, None).unwrap();
        assert!((h_min(&rho, &opts()).unwrap().value - 0.42).abs() < 1e-6);
    }

    #[test]
    fn upper_bound_examples() {
        assert!((h_min_upper_bound(&bell()).unwrap() - 0.75).abs() < 1e-12);
        let mixed = DensityMatrix::new(ComplexMatrix::identity(6).scale(1.0 / 6.0), 2, 3).unwrap();
        assert!(h_min_upper_bound(&mixed).unwrap() >= h_min(&mixed, &opts()).unwrap().value);
    }

    #[test]
    fn closed_2xn_matches_bell_formula() {
        let c6 = 0.6;
        let rho = bell_diagonal([-c6, -c6, -c6]).unwrap();
        let r = h_min_2xn_closed(&rho, &opts()).unwrap();
        assert!((r.value - h_min_bell_diagonal([-c6, -c6, -c6]).unwrap()).abs() < 1e-10);
        assert!(r.cross_check.unwrap() < 1e-6);
        assert_eq!(r.flags.get("restricted_matches"), Some(&true));
        assert_eq!(r.flags.get("full_spectrum_matches"), Some(&false));
    }

    #[test]
    fn closed_2xn_nondegenerate_matches_eigenprojectors() {
        let rho = random_density(2, 3, 4, 21).unwrap();
        let r = h_min_2xn_closed(&rho, &MeasureOptions { cross_check: false, ..opts() }).unwrap();
        let spec = crate::linalg::herm_eig(&rho.marginal(Subsystem::A)).unwrap();
        let p = crate::measurements::projective_from_unitary(&spec.eigenvectors).unwrap();
        let s = rho.sqrt().unwrap();
        let direct = 1.0 - trace_product(&s, &apply_local_measurement(&s, &p).unwrap()).re;
        assert!((r.value - direct).abs() < 1e-10);
    }

    #[test]
    fn bell_diagonal_formula_examples() {
        assert!(h_min_bell_diagonal([0.0; 3]).unwrap().abs() < 1e-15);
        assert!((h_min_bell_diagonal([-1.0; 3]).unwrap() - 0.5).abs() < 1e-15);
        let rho = bell_diagonal([-0.5; 3]).unwrap();
        let opt = h_min_optimized(&rho, &OptimizerConfig::default()).unwrap();
        assert!((1.0 - opt.best_value - h_min_bell_diagonal([-0.5; 3]).unwrap()).abs() < 1e-6);
        assert!(h_min_bell_diagonal([1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn family_formula_examples() {
        assert!(h_min_isotropic(2, 0.25).unwrap().abs() < 1e-15);
        assert!((h_min_isotropic(2, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(h_min_isotropic(2, 1.5).is_err());
        assert!(h_min_werner(2, 0.5).unwrap().abs() < 1e-15);
        assert!((h_min_werner(2, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((h_min_werner(2, -1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(h_min_werner(2, -1.5).is_err());
        // quotient forms agree with the difference forms away from the roots
        for (d, x) in [(2usize, -0.3f64), (3, 0.7), (4, 0.05)] {
            let df = d as f64;
            let literal = 0.5 * ((df - x) / (df + 1.0) - ((df - 1.0) / (df + 1.0) * (1.0 - x * x)).sqrt());
            assert!((h_min_werner(d, x).unwrap() - literal).abs() < 1e-14);
            let xi = x.abs();
            let t = ((df - 1.0) * xi).sqrt() - ((1.0 - xi) / (df + 1.0)).sqrt();
            assert!((h_min_isotropic(d, xi).unwrap() - t * t / df).abs() < 1e-14);
        }
    }

    #[test]
    fn family_formulas_match_optimizer() {
        let rho = isotropic(3, 0.5).unwrap();
        let opt = h_min_optimized(&rho, &OptimizerConfig::default()).unwrap();
        assert!((1.0 - opt.best_value - h_min_isotropic(3, 0.5).unwrap()).abs() < 1e-6);
        let rho = werner(2, 1.0).unwrap();
        let r = h_min(&rho, &opts()).unwrap();
        assert!((r.value - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn weak_examples() {
        let r = weak_h_min(&bell(), 1.0, &opts()).unwrap();
        let tau = 1.0 / 1f64.cosh();
        assert!((r.value - 0.5 * (1.0 - tau).powi(2)).abs() < 1e-6);
        assert!(r.cross_check.unwrap() < 1e-6);
        let r = weak_h_min(&bell(), 20.0, &opts()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6);
        let prod = product_state(
            random_density(2, 1, 2, 5).unwrap().matrix(),
            random_density(2, 1, 2, 6).unwrap().matrix(),
        )
        .unwrap();
        assert!(weak_h_min(&prod, 0.7, &opts()).unwrap().value < 1e-8);
        assert!(weak_h_min(&bell(), 0.0, &opts()).is_err());
    }

    #[test]
    fn seq_distance_examples() {
        let rho = random_density(2, 2, 4, 30).unwrap();
        let p = ProjectiveMeasurement::computational(2);
        assert_eq!(seq_distance(&rho, &p, 1.0, 3, 3).unwrap().direct, 0.0);
        for (m, n) in [(0, 1), (2, 5), (5, 0)] {
            let d = seq_distance(&rho, &p, 0.8, m, n).unwrap();
            assert!((d.direct - d.formula).abs() < 1e-10);
        }
        let d = seq_distance(&bell(), &p, 1.5, 0, 10).unwrap();
        assert!(d.direct < 0.5 && d.direct > 0.49);
    }

    #[test]
    fn skew_information_examples() {
        let rho = random_density(2, 2, 4, 40).unwrap();
        assert!(skew_information(&rho, rho.matrix()).unwrap().abs() < 1e-12);
        // pure state: I(ψ, K) = ⟨K²⟩ − ⟨K⟩² for a projector K
        let psi = pure_from_schmidt(&SchmidtForm::new(alloc::vec![0.6, 0.4], 2, 2).unwrap(), None, None).unwrap();
        let k = kron(&ComplexMatrix::from_diagonal(&[1.0, 0.0]), &ComplexMatrix::identity(2));
        let mean = trace_product(psi.matrix(), &k).re;
        assert!((skew_information(&psi, &k).unwrap() - (mean - mean * mean)).abs() < 1e-12);
        let bad = ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let q = DensityMatrix::new(ComplexMatrix::identity(2).scale(0.5), 2, 1).unwrap();
        assert!(matches!(skew_information(&q, &bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn skew_min_equals_h_min() {
        let r = skew_min(&bell(), &opts()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6);
        for seed in 0..5 {
            let rho = random_density(2, 2, 3, 50 + seed).unwrap();
            let r = skew_min(&rho, &opts()).unwrap();
            assert!(r.cross_check.unwrap() < 1e-6);
        }
    }

    #[test]
    fn affinity_examples() {
        let r = affinity_min(&bell(), &opts()).unwrap();
        assert!((r.value - (1.0 - 0.5f64.sqrt())).abs() < 1e-6);
        assert_eq!(r.flags.get("sqrt_commutes"), Some(&false));

        // block diagonal in the computational basis of a
        let s0 = random_density(2, 1, 2, 60).unwrap();
        let s1 = random_density(2, 1, 2, 61).unwrap();
        let mut mat = kron(&ComplexMatrix::from_diagonal(&[0.7, 0.0]), s0.matrix());
        mat += &kron(&ComplexMatrix::from_diagonal(&[0.0, 0.3]), s1.matrix());
        let rho = DensityMatrix::new(mat, 2, 2).unwrap();
        let r = affinity_min(&rho, &opts()).unwrap();
        assert!(r.value.abs() < 1e-10);
        assert_eq!(r.flags.get("sqrt_commutes"), Some(&true));
    }

    #[test]
    fn measure_names_round_trip() {
        for k in MeasureKind::ALL {
            assert_eq!(k.name().parse::<MeasureKind>().unwrap(), k);
        }
        assert!("nope".parse::<MeasureKind>().is_err());
    }
}
