//! Command-line front end for the spectral Dolbeault toolkit.
//!
//! Each subcommand loads a JSON experiment configuration, runs its
//! measurement program, and emits a structured report whose checks determine
//! the exit code:
//!
//! * `0` — every certificate check passed;
//! * `1` — at least one certificate check failed (the report is still
//!   written);
//! * `2` — invalid configuration or violated precondition;
//! * `3` — a solver hit its iteration cap without converging.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod report;
mod tasks;

use config::{Command, ConfigError, ExperimentConfig};
use tasks::TaskError;

#[derive(Parser)]
#[command(name = "dolbeault-cli", version, about = "Spectral Dolbeault calculus experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory that receives CSV artifacts (residual traces, map samples,
    /// benchmark tables).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override the seed declared in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the tolerance declared in the configuration.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Verify the Green-operator relations, the contraction bound of
    /// T = ∂̄*G∂, and the bracket/conjugation identities.
    VerifyOps(RunArgs),
    /// Solve the holomorphic extension equation for an (n, 0)-form.
    Extend(RunArgs),
    /// Solve the extension equation for a general (p, q)-form.
    PqExtend(RunArgs),
    /// Solve the dimension-one Beltrami equation ∂̄f = μ∂f.
    Beltrami(RunArgs),
    /// Check the weighted-connection and holomorphy-defect identities on a
    /// Kähler patch.
    PluriCheck(RunArgs),
    /// Time the transform, the T-operator, and full solves across grid sizes.
    Bench(RunArgs),
}

impl Sub {
    fn expected(&self) -> (Command, &RunArgs) {
        match self {
            Sub::VerifyOps(a) => (Command::VerifyOps, a),
            Sub::Extend(a) => (Command::Extend, a),
            Sub::PqExtend(a) => (Command::PqExtend, a),
            Sub::Beltrami(a) => (Command::Beltrami, a),
            Sub::PluriCheck(a) => (Command::PluriCheck, a),
            Sub::Bench(a) => (Command::Bench, a),
        }
    }
}

fn run(cli: &Cli) -> Result<bool, TaskError> {
    let (expected, args) = cli.cmd.expected();
    let mut config = ExperimentConfig::from_path(&args.config)?;
    if config.command != expected {
        return Err(ConfigError(format!(
            "config declares command '{}' but the '{expected}' subcommand was invoked",
            config.command
        ))
        .into());
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(tol) = args.tol {
        config.tol = tol;
    }
    let config = config.resolved()?;
    let report = tasks::run(&config, args.csv.as_deref())?;
    report.emit(args.out.as_deref())?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(TaskError::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(TaskError::NonConvergence(msg)) => {
            eprintln!("solver did not converge: {msg}");
            ExitCode::from(3)
        }
    }
}
