//! `kirchhoff`: command-line front end for the radial Kirchhoff solver.
//!
//! Every command writes a JSON report `{config, command, results, diagnostics,
//! version}` (to stdout or `--output`); `sweep` writes CSV instead and can add a
//! JSON summary with `--report`. Exit codes: 0 success, 2 invalid input,
//! 3 no convergence, 4 failed assumption check.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kirchhoff_core::GridSpec;
use serde_json::{json, Value};

use commands::{Direction, Metric, Outcome, SolveFlags, SweepArgs};
use config::{apply_override, RunConfig};
use error::CliError;
use report::{emit, to_json_string, Report};

#[derive(Parser)]
#[command(name = "kirchhoff", version, about = "Radial ground states of a doubly critical Kirchhoff problem")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON run configuration; the built-in degenerate example is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config entry, e.g. `--set lambda=10` or `--set grid.n=2048`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn value(&self) -> Result<Value, CliError> {
        let mut v = RunConfig::read_value(self.config.as_deref())?;
        for o in &self.overrides {
            let (k, raw) = o.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("override '{o}' is not of the form key=value"))
            })?;
            apply_override(&mut v, k, raw)?;
        }
        Ok(v)
    }

    fn load(&self) -> Result<(RunConfig, Value), CliError> {
        let cfg = RunConfig::from_value(self.value()?)?;
        let echo = serde_json::to_value(&cfg).map_err(|e| CliError::Internal(e.to_string()))?;
        Ok((cfg, echo))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Best constants: closed form against bubble quadrature.
    Constants {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1.5,-1,-0.5,0,1,2")]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 100.0)]
        radius: f64,
        #[arg(long, default_value_t = 8)]
        per_decade: usize,
    },
    /// Residual of the bubble in its Euler-Lagrange equation.
    ExtremalVerify {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Convergence rates of the cut-off bubble integrals.
    Asymptotics {
        #[arg(long, allow_hyphen_values = true)]
        alpha1: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha2: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.02,0.01")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        grading: f64,
    },
    /// Nehari projection of a test direction.
    Nehari {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// one-minus-r, bubble, bubble-scan, singular-cutoff or random.
        #[arg(long, default_value = "one-minus-r")]
        direction: String,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        /// Exponent of the singular cut-off direction.
        #[arg(long, default_value_t = 0.25)]
        k: f64,
    },
    /// Ground state by Nehari descent, cross-checked by the mountain-pass solver.
    Solve {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Accept lambda = 0; the infimum is then not attained.
        #[arg(long)]
        reference_mode: bool,
        /// Run even when the assumption checks fail.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        skip_mountain_pass: bool,
        /// Include the minimizer's nodal values in the report.
        #[arg(long)]
        profile: bool,
    },
    /// Compactness threshold for the configured regime.
    Threshold {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Ground-state level against the threshold.
    Compare {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        reference_mode: bool,
        #[arg(long)]
        force: bool,
    },
    /// One CSV row per value of a single config entry.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Config key to vary (short names such as `lambda`, `mu`, `q`, `n` work).
        #[arg(long)]
        vary: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Metric::Level)]
        metric: Metric,
        /// Direction for `--metric scaling`.
        #[arg(long, default_value = "singular-cutoff")]
        direction: String,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.25)]
        k: f64,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        skip_mountain_pass: bool,
        /// Also write a JSON summary (smallest and largest value below threshold).
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn write_report(cli_out: Option<&std::path::Path>, name: &str, config: Value, out: Outcome) -> Result<(), CliError> {
    let report = Report::new(name, config, out.results, out.diagnostics);
    emit(&to_json_string(&report)?, cli_out)?;
    match out.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = cli.output.as_deref();
    match cli.command {
        Command::Constants { alpha, radius, per_decade } => {
            let o = commands::constants(&alpha, radius, per_decade)?;
            write_report(out, "constants", json!({"alpha": alpha}), o)
        }
        Command::ExtremalVerify { alpha, points } => {
            let o = commands::extremal_verify(&alpha, points)?;
            write_report(out, "extremal-verify", json!({"alpha": alpha, "points": points}), o)
        }
        Command::Asymptotics { alpha1, alpha2, eps, n, grading } => {
            let grid = GridSpec { n, grading };
            let o = commands::asymptotics(alpha1, alpha2, &eps, grid)?;
            let cfg = json!({"alpha1": alpha1, "alpha2": alpha2, "eps": eps, "grid": grid});
            write_report(out, "asymptotics", cfg, o)
        }
        Command::Nehari { cfg, direction, epsilon, k } => {
            let (rc, mut echo) = cfg.load()?;
            let dir = Direction::parse(&direction, epsilon, k)?;
            echo["direction"] = json!({"name": direction, "epsilon": epsilon, "k": k});
            write_report(out, "nehari", echo, commands::nehari(&rc, &dir)?)
        }
        Command::Solve { cfg, reference_mode, force, skip_mountain_pass, profile } => {
            let (rc, echo) = cfg.load()?;
            let flags = SolveFlags { reference_mode, force, skip_mountain_pass, profile };
            write_report(out, "solve", echo, commands::solve(&rc, &flags)?)
        }
        Command::Threshold { cfg } => {
            let (rc, echo) = cfg.load()?;
            write_report(out, "threshold", echo, commands::threshold(&rc)?)
        }
        Command::Compare { cfg, reference_mode, force } => {
            let (rc, echo) = cfg.load()?;
            write_report(out, "compare", echo, commands::compare(&rc, reference_mode, force)?)
        }
        Command::Sweep {
            cfg, vary, values, jobs, metric, direction, epsilon, k, force, skip_mountain_pass, report,
        } => {
            let base = cfg.value()?;
            // the base config must be valid on its own before any point runs
            RunConfig::from_value(base.clone())?;
            let dir = Direction::parse(&direction, epsilon, k)?;
            let args = SweepArgs {
                base: &base,
                vary: &vary,
                values: &values,
                jobs,
                metric,
                direction: &dir,
                force,
                skip_mountain_pass,
            };
            let (csv, outcome) = commands::sweep(&args)?;
            emit(&csv, out)?;
            let Outcome { results, diagnostics, failure } = outcome;
            if let Some(path) = report {
                let mut echo = base.clone();
                echo["sweep"] = json!({"vary": vary, "values": values, "metric": format!("{metric:?}").to_lowercase()});
                let summary = Report::new("sweep", echo, results, diagnostics);
                emit(&to_json_string(&summary)?, Some(&path))?;
            }
            failure.map_or(Ok(()), Err)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kirchhoff: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
