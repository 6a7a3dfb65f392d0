//! Command implementations. Each returns what `main` needs to pick an exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use spinlab_core::analysis::{error_report, nutation_sweep, ErrorReport, SweepGrid, SweepResult};
use spinlab_core::integrate::stepper_registry;
use spinlab_core::model::{derive_params, DerivedParams, StabilityClass, SystemConfig};
use spinlab_core::propagate::{model_registry, ModelKind, Trajectory};

use crate::error::{CliError, CliResult};
use crate::output;

/// Run-level settings shared by the trajectory commands.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub tau_end: f64,
    pub dt: f64,
    pub integrator: String,
}

impl RunSpec {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.tau_end.is_finite() && self.tau_end > 0.0) {
            return Err(CliError::Usage(format!("--tau-end must be positive, got {}", self.tau_end)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(CliError::Usage(format!("--dt must be positive, got {}", self.dt)));
        }
        if self.dt > self.tau_end {
            return Err(CliError::Usage(format!("--dt {} exceeds --tau-end {}", self.dt, self.tau_end)));
        }
        Ok(())
    }
}

pub fn run_model(cfg: &SystemConfig, model: ModelKind, spec: &RunSpec) -> CliResult<Trajectory> {
    let steppers = stepper_registry();
    let stepper = steppers.get(&spec.integrator)?;
    Ok(model_registry().get(model.name())?.run(cfg, spec.tau_end, spec.dt, stepper)?)
}

/// First line of the stability report, e.g. `Stable, σ=-8000, λ=0.527046`.
pub fn headline(p: &DerivedParams) -> String {
    format!("{}, σ={}, λ={:.6}", p.stability.label(), p.sigma, p.lambda)
}

pub fn stability_report(p: &DerivedParams) -> String {
    let mut s = headline(p);
    s.push('\n');
    let eps = p.epsilon.map_or("undefined".to_string(), |e| format!("{e}"));
    let rows: [(&str, String); 13] = [
        ("gamma", format!("{}", p.gamma)),
        ("alpha", format!("{}", p.alpha)),
        ("beta", format!("{}", p.beta)),
        ("c1", format!("{}", p.c1)),
        ("c2", format!("{}", p.c2)),
        ("u1", format!("{}", p.u1)),
        ("u2", format!("{}", p.u2)),
        ("sigma", format!("{}", p.sigma)),
        ("lambda", format!("{}", p.lambda)),
        ("epsilon", eps),
        ("ixx_aug", format!("{}", p.ixx_aug)),
        ("izz_aug", format!("{}", p.izz_aug)),
        ("regime", p.stability.regime().to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "  {k:<8} {v}");
    }
    if p.lambda_degenerate {
        s.push_str("  warning: lambda is degenerate; closed-form amplitudes are undefined\n");
    }
    if p.resonant {
        s.push_str("  warning: lambda is at resonance; Euler-angle closed forms are singular\n");
    }
    s
}

pub fn stability(cfg: &SystemConfig) -> CliResult<StabilityClass> {
    let p = derive_params(cfg)?;
    print!("{}", stability_report(&p));
    Ok(p.stability)
}

pub fn simulate(cfg: &SystemConfig, model: ModelKind, spec: &RunSpec, out: &Path, seconds: bool) -> CliResult<PathBuf> {
    spec.validate()?;
    let traj = run_model(cfg, model, spec)?;
    let path = output::write_trajectory(&out.join(format!("{}.csv", model.name())), &traj, seconds)?;
    println!("{} rows -> {}", traj.len(), path.display());
    Ok(path)
}

/// Error reports of `test` against `reference` over `[0, w]` for each window.
pub fn window_reports(reference: &Trajectory, test: &Trajectory, windows: &[f64]) -> CliResult<Vec<(String, ErrorReport)>> {
    windows
        .iter()
        .map(|&w| Ok((format!("tau<{w}"), error_report(reference, test, (0.0, w))?)))
        .collect()
}

/// Runs both models side by side.
pub fn run_pair(cfg: &SystemConfig, reference: ModelKind, test: ModelKind, spec: &RunSpec) -> CliResult<(Trajectory, Trajectory)> {
    std::thread::scope(|s| {
        let r = s.spawn(|| run_model(cfg, reference, spec));
        let t = run_model(cfg, test, spec);
        let r = r.join().expect("propagation thread panicked");
        Ok((r?, t?))
    })
}

pub struct CompareArgs<'a> {
    pub reference: ModelKind,
    pub test: ModelKind,
    pub windows: &'a [f64],
    /// Values of `Ixy/Izz′` for the amplitude-vs-error sweep.
    pub gammas: Option<Vec<f64>>,
}

pub const GAMMA_SWEEP_HEADER: [&str; 7] = ["gamma", "epsilon", "mre", "mse", "rmse", "r2", "window_hi"];

pub fn compare(cfg: &SystemConfig, args: &CompareArgs, spec: &RunSpec, out: &Path) -> CliResult<Vec<PathBuf>> {
    spec.validate()?;
    if let Some(w) = args.windows.iter().find(|w| **w > spec.tau_end) {
        return Err(CliError::Usage(format!("window {w} exceeds --tau-end {}", spec.tau_end)));
    }
    let (reference, test) = run_pair(cfg, args.reference, args.test, spec)?;
    let rows = window_reports(&reference, &test, args.windows)?;
    println!("{} vs {} ({} samples)", args.test, args.reference, reference.len());
    for (label, r) in &rows {
        println!("  {label:<12} MRE {:.4e}  RMSE {:.4e}  R2 {}", r.mre, r.rmse, r.r2.map_or("n/a".into(), |v| format!("{v:.6}")));
    }
    let mut written = vec![output::write_errors(&out.join("errors.csv"), &rows)?];

    if let Some(gammas) = &args.gammas {
        let hi = args.windows.iter().copied().fold(0.0, f64::max);
        let table = gamma_sweep(cfg, args, gammas, hi, spec)?;
        for row in &table {
            println!("  gamma {:.3e}  eps {:.3e}  MRE {:.4e}", row[0], row[1], row[2]);
        }
        written.push(output::write_table(&out.join("gamma_sweep.csv"), &GAMMA_SWEEP_HEADER, &table)?);
    }
    for p in &written {
        println!("-> {}", p.display());
    }
    Ok(written)
}

/// One row per γ: the configuration keeps its inertias and takes `Ixy = γ·Izz′`.
fn gamma_sweep(cfg: &SystemConfig, args: &CompareArgs, gammas: &[f64], hi: f64, spec: &RunSpec) -> CliResult<Vec<Vec<f64>>> {
    let izz_aug = cfg.spin.izz + cfg.platform.ibr;
    std::thread::scope(|s| {
        let handles: Vec<_> = gammas
            .iter()
            .map(|&g| {
                s.spawn(move || -> CliResult<Vec<f64>> {
                    let c = cfg.with_ixy(g * izz_aug);
                    let p = derive_params(&c)?;
                    let (r, t) = (run_model(&c, args.reference, spec)?, run_model(&c, args.test, spec)?);
                    let rep = error_report(&r, &t, (0.0, hi))?;
                    Ok(vec![g, p.epsilon.unwrap_or(f64::NAN), rep.mre, rep.mse, rep.rmse, rep.r2.unwrap_or(f64::NAN), hi])
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep thread panicked")).collect()
    })
}

pub fn sweep(grid: &SweepGrid, gamma: f64, out: &Path) -> CliResult<(PathBuf, SweepResult)> {
    let result = nutation_sweep(grid, gamma)?;
    let path = output::write_sweep(&out.join("sweep.csv"), &result.rows)?;
    println!("{} of {} grid points written, {} skipped (not stable, degenerate or resonant) -> {}",
        result.rows.len(), grid.len(), result.skipped, path.display());
    Ok((path, result))
}

/// Named reproduction bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Example1,
    Example2,
    Table1,
    Fig4,
    Fig5,
}

impl Target {
    pub const ALL: [Target; 5] = [Target::Example1, Target::Example2, Target::Table1, Target::Fig4, Target::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Target::Example1 => "example1",
            Target::Example2 => "example2",
            Target::Table1 => "table1",
            Target::Fig4 => "fig4",
            Target::Fig5 => "fig5",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        Target::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let names: Vec<_> = Target::ALL.iter().map(|t| t.name()).collect();
            CliError::Usage(format!("unknown reproduce target `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

pub use crate::reproduce::reproduce;
