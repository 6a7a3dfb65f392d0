//! `spinlab`: batch front end for the spacecraft attitude toolkit.
//!
//! Exit codes: 0 stable, 1 marginally unstable, 2 exponentially unstable
//! (for `stability`; other commands exit 0 on success), 3 usage error,
//! 4 configuration error, 5 computation error, 6 I/O error.

mod commands;
mod config;
mod error;
mod grid;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinlab_core::model::{derive_params, StabilityClass};
use spinlab_core::propagate::ModelKind;

use commands::{CompareArgs, RunSpec, Target};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "spinlab", version, about = "Attitude dynamics of a spacecraft with an unbalanced rotor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OutArg {
    /// Output directory.
    #[arg(long, env = "SPINLAB_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Final dimensionless time τ.
    #[arg(long = "tau-end", default_value_t = 100.0)]
    tau_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Integrator: rk4 or dopri5.
    #[arg(long, default_value = "rk4")]
    integrator: String,
    #[command(flatten)]
    out: OutArg,
}

impl RunArgs {
    fn spec(&self) -> RunSpec {
        RunSpec { tau_end: self.tau_end, dt: self.dt, integrator: self.integrator.clone() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the reduced-system coefficients and the stability class.
    Stability {
        #[arg(long)]
        config: PathBuf,
    },
    /// Propagate one model and write its trajectory CSV.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// full, first or analytic.
        #[arg(long, default_value = "full")]
        model: String,
        /// Append a physical-time column t = τ/omega_mag.
        #[arg(long)]
        seconds: bool,
    },
    /// Compare a model against a reference over nested windows.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Model under test.
        #[arg(long, default_value = "analytic")]
        model: String,
        #[arg(long, default_value = "full")]
        reference: String,
        /// Comma-separated window ends; each window is [0, end].
        #[arg(long, default_value = "33,66,100")]
        windows: String,
        /// Log-spaced γ = Ixy/Izz′ range `min:max:count` for the amplitude-vs-error sweep.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
    },
    /// Relative nutation amplitude over a grid of augmented inertias.
    Sweep {
        /// `ixx_aug=min:max:count,iyy=min:max:count,izz_aug=min:max:count`
        #[arg(long)]
        grid: String,
        /// γ = Ixy/Izz′; taken from --config when omitted.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Write the bundle for one worked example, table or figure.
    Reproduce {
        /// example1, example2, table1, fig4 or fig5.
        target: String,
        /// Step for the bundle's trajectories (default 0.01).
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
}

fn model(name: &str) -> CliResult<ModelKind> {
    name.parse().map_err(|_| CliError::Usage(format!("unknown model `{name}` (expected full, first or analytic)")))
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Stability { config } => {
            let cfg = config::load(&config)?;
            Ok(match commands::stability(&cfg)? {
                StabilityClass::Stable => 0,
                StabilityClass::MarginallyUnstable => 1,
                StabilityClass::ExponentiallyUnstable => 2,
            })
        }
        Command::Simulate { run, model: m, seconds } => {
            let m = model(&m)?;
            let cfg = config::load(&run.config)?;
            commands::simulate(&cfg, m, &run.spec(), &run.out.out, seconds)?;
            Ok(0)
        }
        Command::Compare { run, model: m, reference, windows, gamma } => {
            let (test, reference) = (model(&m)?, model(&reference)?);
            let windows = grid::parse_windows(&windows)?;
            let gammas = gamma.map(|g| grid::parse_range(&g, "gamma", true)?.logarithmic()).transpose()?;
            let cfg = config::load(&run.config)?;
            let args = CompareArgs { reference, test, windows: &windows, gammas };
            commands::compare(&cfg, &args, &run.spec(), &run.out.out)?;
            Ok(0)
        }
        Command::Sweep { grid: spec, gamma, config, out } => {
            let grid = grid::parse_grid(&spec)?;
            let gamma = match (gamma, config) {
                (Some(g), _) => g,
                (None, Some(path)) => derive_params(&config::load(&path)?)?.gamma,
                (None, None) => return Err(CliError::Usage("sweep needs --gamma or --config".into())),
            };
            commands::sweep(&grid, gamma, &out.out)?;
            Ok(0)
        }
        Command::Reproduce { target, dt, out } => {
            let target = Target::parse(&target)?;
            if let Some(dt) = dt {
                if !(dt.is_finite() && dt > 0.0) {
                    return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
                }
            }
            commands::reproduce(target, &out.out, dt)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap would exit 2, which is reserved for the unstable class.
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
