//! Derivative-free search over von Neumann measurements on subsystem `a`.
//!
//! Qubit measurements are parameterized by the Bloch axis `(θ, φ)` of `Π₁`
//! and searched with a 32×64 grid followed by Nelder-Mead from the best
//! grid points. Larger dimensions use `U = V · ⊕_b exp(iH_b)` where `V`
//! diagonalizes the invariance constraint (identity when there is none)
//! and each `H_b` is spanned by the off-diagonal Gell-Mann elements of one
//! eigenspace; the diagonal elements only rephase columns and leave the
//! projectors unchanged, so they are dropped.
//!
//! All evaluations follow one fixed schedule per seed. The budget cuts the
//! schedule short, so raising it can only lower the minimum found.

use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)] // redundant when another crate in the build links std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::gell_mann_basis;
use crate::error::{Error, Result};
use crate::linalg::{c, expm_i_hermitian, ComplexMatrix};
use crate::measurements::{eigenspaces, ProjectiveMeasurement};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Goal {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MeasurementParams {
    /// Bloch axis of `Π₁`, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    Sphere { theta: f64, phi: f64 },
    /// Generator coefficients, block by block.
    Generator(Vec<f64>),
    /// The constraint fixes the measurement uniquely.
    Fixed,
}

#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    /// Total objective evaluations allowed.
    pub budget: usize,
    pub seed: u64,
    /// `(θ, φ)` grid resolution for qubits.
    pub grid: (usize, usize),
    /// Grid points refined by Nelder-Mead.
    pub grid_starts: usize,
    /// Random restarts for generator searches.
    pub restarts: usize,
    pub sphere_local_evals: usize,
    pub generator_local_evals: usize,
    /// Coefficients of random starts are drawn from `[-start_range, start_range]`.
    pub start_range: f64,
    pub initial_step: f64,
    /// Simplex stops once the value spread and the diameter are below these.
    pub f_tol: f64,
    pub x_tol: f64,
    /// Restarts count as agreeing when their values differ by less than this.
    pub agreement: f64,
    /// Eigenvalue gap below which constraint eigenspaces merge.
    pub degeneracy: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            budget: 20_000,
            seed: 7,
            grid: (32, 64),
            grid_starts: 5,
            restarts: 20,
            sphere_local_evals: 2000,
            generator_local_evals: 1000,
            start_range: core::f64::consts::PI,
            initial_step: 0.6,
            f_tol: 1e-14,
            x_tol: 1e-6,
            agreement: 1e-8,
            degeneracy: tol::DEGENERACY,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizerResult {
    /// Objective at the best point, in the caller's sense (max for `Maximize`).
    pub best_value: f64,
    pub best_params: MeasurementParams,
    pub best_measurement: ProjectiveMeasurement,
    pub evaluations: usize,
    /// Local searches started.
    pub restarts: usize,
    /// Final value of each local search, in schedule order.
    pub restart_values: Vec<f64>,
    /// Best two local searches agree within `agreement`, and the budget held.
    pub converged: bool,
    pub budget_exhausted: bool,
}

/// Stops the schedule once the budget is spent.
struct Exhausted;

enum Failure {
    Budget(Exhausted),
    Objective(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Objective(e)
    }
}

/// Search space: maps a parameter vector to a measurement.
enum Space {
    Sphere,
    Generator { frame: ComplexMatrix, blocks: Vec<(Range<usize>, Vec<ComplexMatrix>)> },
}

impl Space {
    fn dim(&self) -> usize {
        match self {
            Space::Sphere => 2,
            Space::Generator { blocks, .. } => blocks.iter().map(|(_, g)| g.len()).sum(),
        }
    }

    fn measurement(&self, x: &[f64]) -> Result<ProjectiveMeasurement> {
        match self {
            Space::Sphere => Ok(qubit_measurement(x[0], x[1])),
            Space::Generator { frame, blocks } => {
                let m = frame.rows();
                let mut local = ComplexMatrix::identity(m);
                let mut offset = 0;
                for (range, gens) in blocks {
                    let b = range.len();
                    let mut h = ComplexMatrix::zeros(b, b);
                    for (g, &a) in gens.iter().zip(&x[offset..offset + gens.len()]) {
                        h += &g.scale(a);
                    }
                    offset += gens.len();
                    let u = expm_i_hermitian(&h)?;
                    for i in 0..b {
                        for j in 0..b {
                            local[(range.start + i, range.start + j)] = u[(i, j)];
                        }
                    }
                }
                Ok(ProjectiveMeasurement::from_unitary_columns(&(frame * &local)))
            }
        }
    }

    fn params(&self, x: &[f64]) -> MeasurementParams {
        match self {
            Space::Sphere => {
                let [nx, ny, nz] = bloch_axis(x[0], x[1]);
                let theta = nz.clamp(-1.0, 1.0).acos();
                let mut phi = ny.atan2(nx);
                if phi < 0.0 {
                    phi += 2.0 * core::f64::consts::PI;
                }
                MeasurementParams::Sphere { theta, phi }
            }
            Space::Generator { .. } => MeasurementParams::Generator(x.to_vec()),
        }
    }
}

fn bloch_axis(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// `Π₁ = ½(I + n̂·σ)`, `Π₂ = I − Π₁` with `n̂` the axis at `(θ, φ)`.
pub fn qubit_measurement(theta: f64, phi: f64) -> ProjectiveMeasurement {
    let [x, y, z] = bloch_axis(theta, phi);
    let p1 = ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(0.5 * (1.0 + z), 0.0), c(0.5 * x, -0.5 * y), c(0.5 * x, 0.5 * y), c(0.5 * (1.0 - z), 0.0)],
    );
    let p2 = ComplexMatrix::identity(2) - &p1;
    ProjectiveMeasurement::from_parts(alloc::vec![p1, p2])
}

/// Measurement induced by generator coefficients over the full unitary
/// group of `C^m` (no constraint).
pub fn generator_measurement(m: usize, coefficients: &[f64]) -> Result<ProjectiveMeasurement> {
    let space = generator_space(ComplexMatrix::identity(m), alloc::vec![0..m])?;
    if coefficients.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: coefficients.len() });
    }
    space.measurement(coefficients)
}

fn generator_space(frame: ComplexMatrix, ranges: Vec<Range<usize>>) -> Result<Space> {
    let mut blocks = Vec::new();
    for range in ranges {
        let b = range.len();
        if b < 2 {
            continue;
        }
        let basis = gell_mann_basis(b)?;
        let off_diagonal = basis.elements()[1..=b * (b - 1)].to_vec();
        blocks.push((range, off_diagonal));
    }
    Ok(Space::Generator { frame, blocks })
}

struct Evaluator<'a, F> {
    objective: &'a mut F,
    sign: f64,
    space: &'a Space,
    budget: usize,
    count: usize,
    best: Option<(f64, Vec<f64>)>,
}

impl<F: FnMut(&ProjectiveMeasurement) -> Result<f64>> Evaluator<'_, F> {
    /// Objective in minimization convention.
    fn eval(&mut self, x: &[f64]) -> core::result::Result<f64, Failure> {
        if self.count >= self.budget {
            return Err(Failure::Budget(Exhausted));
        }
        self.count += 1;
        let p = self.space.measurement(x)?;
        let v = self.sign * (self.objective)(&p)?;
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if self.best.as_ref().map_or(true, |(b, _)| v < *b) {
            self.best = Some((v, x.to_vec()));
        }
        Ok(v)
    }
}

/// Nelder-Mead with the standard coefficients. Returns the best vertex
/// value; budget exhaustion propagates out.
fn nelder_mead<F: FnMut(&ProjectiveMeasurement) -> Result<f64>>(
    ev: &mut Evaluator<'_, F>,
    x0: &[f64],
    step: &[f64],
    max_evals: usize,
    f_tol: f64,
    x_tol: f64,
) -> core::result::Result<f64, Failure> {
    let d = x0.len();
    let start = ev.count;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), ev.eval(x0)?));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let f = ev.eval(&x)?;
        simplex.push((x, f));
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (spread <= f_tol && diameter <= x_tol) || diameter <= 1e-10 || ev.count - start >= max_evals {
            return Ok(simplex[0].1);
        }
        let mut centroid = alloc::vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (ci, xi) in centroid.iter_mut().zip(x) {
                *ci += xi / d as f64;
            }
        }
        let toward = |coef: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[d].0).map(|(c, w)| c + coef * (c - w)).collect()
        };
        let reflected = toward(1.0);
        let fr = ev.eval(&reflected)?;
        if fr < simplex[0].1 {
            let expanded = toward(2.0);
            let fe = ev.eval(&expanded)?;
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[d].1 {
            let x = toward(0.5);
            let f = ev.eval(&x)?;
            (x, f)
        } else {
            let x = toward(-0.5);
            let f = ev.eval(&x)?;
            (x, f)
        };
        if fc < simplex[d].1.min(fr) {
            simplex[d] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let f = ev.eval(&x)?;
            *vertex = (x, f);
        }
    }
}

/// Optimizes `objective` over measurements on `C^m`, restricted to those
/// leaving `constraint` invariant when one is given.
///
/// A nondegenerate constraint admits exactly one measurement (its
/// eigenprojectors), which is evaluated once. Objective errors abort the
/// search; running out of budget returns the best point seen with
/// `converged = false`.
pub fn optimize_measurement<F>(
    mut objective: F,
    m: usize,
    goal: Goal,
    constraint: Option<&ComplexMatrix>,
    config: &OptimizerConfig,
) -> Result<OptimizerResult>
where
    F: FnMut(&ProjectiveMeasurement) -> Result<f64>,
{
    if config.budget == 0 {
        return Err(Error::InvalidBudget);
    }
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    let sign = match goal {
        Goal::Minimize => 1.0,
        Goal::Maximize => -1.0,
    };
    let space = match constraint {
        None if m == 2 => Space::Sphere,
        None => generator_space(ComplexMatrix::identity(m), alloc::vec![0..m])?,
        Some(marginal) => {
            if marginal.rows() != m || !marginal.is_square() {
                return Err(Error::DimensionMismatch { expected: m, found: marginal.rows() });
            }
            let structure = eigenspaces(marginal, config.degeneracy)?;
            if !structure.is_degenerate() {
                let p = ProjectiveMeasurement::from_unitary_columns(&structure.eigenvectors);
                let value = objective(&p)?;
                return Ok(OptimizerResult {
                    best_value: value,
                    best_params: MeasurementParams::Fixed,
                    best_measurement: p,
                    evaluations: 1,
                    restarts: 0,
                    restart_values: Vec::new(),
                    converged: true,
                    budget_exhausted: false,
                });
            }
            if m == 2 {
                Space::Sphere
            } else {
                generator_space(structure.eigenvectors, structure.blocks)?
            }
        }
    };

    let mut ev = Evaluator { objective: &mut objective, sign, space: &space, budget: config.budget, count: 0, best: None };
    let mut restart_values = Vec::new();
    let outcome = match space {
        Space::Sphere => sphere_schedule(&mut ev, config, &mut restart_values),
        Space::Generator { .. } => generator_schedule(&mut ev, config, &mut restart_values),
    };
    let budget_exhausted = match outcome {
        Ok(()) => false,
        Err(Failure::Budget(Exhausted)) => true,
        Err(Failure::Objective(e)) => return Err(e),
    };
    let (value, x) = ev.best.take().ok_or(Error::NoConvergence)?;
    let evaluations = ev.count;

    let mut sorted = restart_values.clone();
    sorted.sort_by(f64::total_cmp);
    let agree = match sorted.as_slice() {
        [] => false,
        [_] => true,
        [a, b, ..] => (b - a).abs() <= config.agreement,
    };
    Ok(OptimizerResult {
        best_value: sign * value,
        best_params: space.params(&x),
        best_measurement: space.measurement(&x)?,
        evaluations,
        restarts: restart_values.len(),
        restart_values: restart_values.into_iter().map(|v| sign * v).collect(),
        converged: agree && !budget_exhausted,
        budget_exhausted,
    })
}

fn sphere_schedule<F: FnMut(&ProjectiveMeasurement) -> Result<f64>>(
    ev: &mut Evaluator<'_, F>,
    config: &OptimizerConfig,
    restart_values: &mut Vec<f64>,
) -> core::result::Result<(), Failure> {
    let (nt, np) = config.grid;
    let dt = core::f64::consts::PI / nt as f64;
    let dp = 2.0 * core::f64::consts::PI / np as f64;
    let mut grid = Vec::with_capacity(nt * np);
    for i in 0..nt {
        for j in 0..np {
            let x = [(i as f64 + 0.5) * dt, j as f64 * dp];
            grid.push((ev.eval(&x)?, x));
        }
    }
    // stable sort keeps the lowest grid index first among ties
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, x) in grid.iter().take(config.grid_starts) {
        let v = nelder_mead(ev, x, &[dt, dp], config.sphere_local_evals, config.f_tol, config.x_tol)?;
        restart_values.push(v);
    }
    Ok(())
}

fn generator_schedule<F: FnMut(&ProjectiveMeasurement) -> Result<f64>>(
    ev: &mut Evaluator<'_, F>,
    config: &OptimizerConfig,
    restart_values: &mut Vec<f64>,
) -> core::result::Result<(), Failure> {
    let d = ev.space.dim();
    if d == 0 {
        ev.eval(&[])?;
        restart_values.push(ev.best.as_ref().map_or(f64::INFINITY, |b| b.0));
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let starts: Vec<Vec<f64>> = (0..config.restarts)
        .map(|_| (0..d).map(|_| (2.0 * rng.random::<f64>() - 1.0) * config.start_range).collect())
        .collect();
    let step = alloc::vec![config.initial_step; d];
    for x0 in &starts {
        let v = nelder_mead(ev, x0, &step, config.generator_local_evals, config.f_tol, config.x_tol)?;
        restart_values.push(v);
    }
    Ok(())
}
