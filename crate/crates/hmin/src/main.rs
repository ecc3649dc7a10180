use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hmin::sweep::{run_sweep, Column, Family, SweepSpec};
use hmin::verify::{run_verify, VerifyConfig};
use hmin::{io, seqweak, sweep, CliError, ErrorKind};
use hmin_core::states::{product_state, random_density, random_density_with};
use hmin_core::{measures, DensityMatrix, MeasureKind, MeasureOptions, MeasureReport, OptimizerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const DEFAULT_SEED: u64 = 7;
const DEFAULT_BUDGET: usize = 20_000;

/// Measurement-induced nonlocality of bipartite states.
#[derive(Parser)]
#[command(name = "hmin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct OptimizerArgs {
    /// Objective evaluations allowed per optimizer run
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Seed for optimizer restarts and random states
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig { budget: self.budget, seed: self.seed, ..OptimizerConfig::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate measures on a state file and print a JSON report
    Measure {
        state: PathBuf,
        /// Comma-separated measure names
        #[arg(long, value_delimiter = ',', default_value = "h_min")]
        measures: Vec<String>,
        /// Weak-measurement strength x for weak_h_min
        #[arg(long, default_value_t = 1.0)]
        strength: f64,
        /// Also run the optimizer where a closed form exists
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        cross_check: bool,
        /// Report unconverged optimizer runs instead of failing
        #[arg(long)]
        allow_unconverged: bool,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Sweep a state family and write one CSV row per grid point
    Sweep {
        #[arg(value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Comma-separated measure names, plus h_min_formula for the closed form
        #[arg(long, value_delimiter = ',', default_value = "h_min,hs_min")]
        measures: Vec<String>,
        /// Multiply measure columns by 2
        #[arg(long)]
        paper_scale: bool,
        /// Evaluate grid points on this many threads
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        strength: f64,
        #[arg(long)]
        allow_unconverged: bool,
        /// Output path; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Distance between √ρ and its sequentially weak-measured version
    Seqweak {
        state: PathBuf,
        /// Comma-separated strengths
        #[arg(long, value_delimiter = ',', default_value = "1,1.5,3")]
        x: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[arg(long)]
        allow_unconverged: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Run every consistency check over a seeded battery of states
    Verify {
        #[arg(long, default_value_t = 20)]
        battery_size: usize,
        /// Extra state files added to the battery
        #[arg(long = "state")]
        states: Vec<PathBuf>,
        /// Report path; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Write a state file
    State {
        #[arg(value_enum)]
        kind: StateKind,
        /// Family parameter (c, x)
        #[arg(long)]
        param: Option<f64>,
        /// Local dimension for isotropic and Werner states
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Dimensions of a and b for random and product states
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Rank of a random state; full rank when omitted
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    BellDiagonal,
    Isotropic,
    Werner,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::BellDiagonal => Family::BellDiagonal,
            FamilyArg::Isotropic => Family::Isotropic,
            FamilyArg::Werner => Family::Werner,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    BellDiagonal,
    Isotropic,
    Werner,
    Random,
    Product,
}

#[derive(Serialize)]
struct MeasureOutput<'a> {
    m: usize,
    n: usize,
    reports: &'a [MeasureReport],
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => io::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_kinds(names: &[String]) -> Result<Vec<MeasureKind>, CliError> {
    names
        .iter()
        .map(|s| match s.parse::<Column>()? {
            Column::Measure(k) => Ok(k),
            Column::Formula => Err(CliError::input("h_min_formula is only available in sweeps")),
        })
        .collect()
}

fn strength_options(strength: f64, cross_check: bool, config: OptimizerConfig) -> Result<MeasureOptions, CliError> {
    if !strength.is_finite() || strength <= 0.0 {
        return Err(CliError::input(format!("strength x = {strength} must be positive")));
    }
    Ok(MeasureOptions { optimizer: config, cross_check, weak_strength: strength })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Measure { state, measures, strength, cross_check, allow_unconverged, optimizer } => {
            let rho = io::read_state(&state)?;
            let kinds = parse_kinds(&measures)?;
            let opts = strength_options(strength, cross_check, optimizer.config())?;
            let reports =
                kinds.into_iter().map(|k| measures::measure(k, &rho, &opts)).collect::<Result<Vec<_>, _>>()?;
            let (m, n) = rho.dims();
            let mut text = serde_json::to_string_pretty(&MeasureOutput { m, n, reports: &reports })
                .expect("report serializes");
            text.push('\n');
            print!("{text}");
            let failed: Vec<&str> = reports.iter().filter(|r| !r.converged()).map(|r| r.kind.name()).collect();
            if !failed.is_empty() && !allow_unconverged {
                return Err(CliError {
                    kind: ErrorKind::Unconverged,
                    message: format!("optimizer did not converge for {}", failed.join(", ")),
                });
            }
            Ok(())
        }
        Command::Sweep {
            family,
            dim,
            start,
            stop,
            steps,
            measures,
            paper_scale,
            jobs,
            strength,
            allow_unconverged,
            out,
            optimizer,
        } => {
            let family = Family::from(family);
            let (lo, hi) = family.range();
            let columns = measures.iter().map(|s| s.parse()).collect::<Result<Vec<Column>, _>>()?;
            let spec = SweepSpec {
                family,
                dim,
                start: start.unwrap_or(lo),
                stop: stop.unwrap_or(hi),
                steps,
                columns,
                scale_by_two: paper_scale,
            };
            let opts = strength_options(strength, true, optimizer.config())?;
            let output = run_sweep(&spec, &opts, jobs)?;
            emit(out.as_ref(), &output.to_csv())?;
            if !output.unconverged.is_empty() && !allow_unconverged {
                return Err(sweep::unconverged_error(&output.unconverged));
            }
            Ok(())
        }
        Command::Seqweak { state, x, n_max, allow_unconverged, out, optimizer } => {
            let rho = io::read_state(&state)?;
            let output = seqweak::seqweak(&rho, &x, n_max, &optimizer.config())?;
            emit(out.as_ref(), &output.to_csv())?;
            if !output.converged && !allow_unconverged {
                return Err(seqweak::unconverged_error());
            }
            Ok(())
        }
        Command::Verify { battery_size, states, out, optimizer } => {
            let extra_states = states.iter().map(|p| io::read_state(p)).collect::<Result<Vec<_>, _>>()?;
            let config = VerifyConfig { battery_size, seed: optimizer.seed, budget: optimizer.budget, extra_states };
            let report = run_verify(&config)?;
            for c in &report.checks {
                eprintln!(
                    "{:<28} {}  cases {:>4}  max residual {:.3e}  tol {:.0e}",
                    c.name,
                    if c.passed { "ok  " } else { "FAIL" },
                    c.cases,
                    c.max_residual,
                    c.tolerance
                );
            }
            for f in &report.findings {
                eprintln!("finding {}: {}", f.name, f.summary);
            }
            emit(out.as_ref(), &report.to_json())?;
            let failures = report.failures();
            if !failures.is_empty() {
                return Err(CliError {
                    kind: ErrorKind::Verification,
                    message: format!("failed checks: {}", failures.join(", ")),
                });
            }
            Ok(())
        }
        Command::State { kind, param, dim, m, n, rank, seed, out } => {
            let family_state = |family: Family| -> Result<DensityMatrix, CliError> {
                let p = param.ok_or_else(|| CliError::input(format!("{family} needs --param")))?;
                SweepSpec { family, dim, start: p, stop: p, steps: 2, columns: vec![Column::Formula], scale_by_two: false }
                    .validate()?;
                family.state(dim, p)
            };
            let rho = match kind {
                StateKind::BellDiagonal => family_state(Family::BellDiagonal)?,
                StateKind::Isotropic => family_state(Family::Isotropic)?,
                StateKind::Werner => family_state(Family::Werner)?,
                StateKind::Random => random_density(m, n, rank.unwrap_or(m * n), seed)?,
                StateKind::Product => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let a = random_density_with(m, 1, m, &mut rng)?;
                    let b = random_density_with(n, 1, n, &mut rng)?;
                    product_state(a.matrix(), b.matrix())?
                }
            };
            let mut text = serde_json::to_string_pretty(&io::StateFile::from_density(&rho)).expect("state serializes");
            text.push('\n');
            emit(out.as_ref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
