//! One-shot bundles for the worked examples, the error table and the figure data.

use std::path::{Path, PathBuf};

use spinlab_core::analysis::{growth_envelope, SweepGrid};
use spinlab_core::analytic::{euler_angles_analytic, nutation_profile};
use spinlab_core::model::{derive_params, SystemConfig};
use spinlab_core::presets;
use spinlab_core::propagate::ModelKind;

use crate::commands::{run_model, run_pair, stability_report, window_reports, RunSpec, Target};
use crate::config;
use crate::error::CliResult;
use crate::output;

/// Step used by the bundles unless overridden.
pub const DEFAULT_DT: f64 = 0.01;

/// Surface shown in the nutation figure: Iyy from 2 to 400 against both augmented transverse axes.
const FIG4_GRID: ([f64; 3], [f64; 3], [f64; 3]) = ([101.0, 121.0, 6.0], [2.0, 400.0, 100.0], [101.0, 121.0, 6.0]);

/// The marginal run stays short; the unstable one stops well before the
/// small-angle kinematics leave their range of validity.
const FIG5_MARGINAL_TAU: f64 = 100.0;
const FIG5_UNSTABLE_TAU: f64 = 700.0;

struct Bundle {
    dir: PathBuf,
    files: Vec<PathBuf>,
    summary: String,
}

impl Bundle {
    fn new(out: &Path, target: Target) -> CliResult<Self> {
        let dir = out.join(target.name());
        output::ensure_dir(&dir)?;
        Ok(Bundle { dir, files: Vec::new(), summary: format!("# {}\n", target.name()) })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn add(&mut self, path: PathBuf) {
        self.files.push(path);
    }

    fn config(&mut self, name: &str, cfg: &SystemConfig) -> CliResult<()> {
        let p = output::write_text(&self.path(name), &config::to_json(cfg))?;
        self.add(p);
        Ok(())
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    fn finish(mut self) -> CliResult<Vec<PathBuf>> {
        let p = output::write_text(&self.path("summary.txt"), &self.summary)?;
        self.add(p);
        print!("{}", self.summary);
        for f in &self.files {
            println!("-> {}", f.display());
        }
        Ok(self.files)
    }
}

fn linspace([lo, hi, n]: [f64; 3]) -> Vec<f64> {
    let n = n as usize;
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub fn reproduce(target: Target, out: &Path, dt: Option<f64>) -> CliResult<Vec<PathBuf>> {
    let dt = dt.unwrap_or(DEFAULT_DT);
    let mut b = Bundle::new(out, target)?;
    match target {
        Target::Example1 | Target::Example2 => {
            let cfg = if target == Target::Example1 { presets::example1() } else { presets::example2() };
            example(&mut b, &cfg, dt)?
        }
        Target::Table1 => table1(&mut b, dt)?,
        Target::Fig4 => fig4(&mut b)?,
        Target::Fig5 => fig5(&mut b, dt)?,
    }
    b.finish()
}

fn spec(tau_end: f64, dt: f64) -> CliResult<RunSpec> {
    let s = RunSpec { tau_end, dt, integrator: "rk4".into() };
    s.validate()?;
    Ok(s)
}

fn error_lines(b: &mut Bundle, rows: &[(String, spinlab_core::analysis::ErrorReport)]) {
    for (label, r) in rows {
        b.line(format!(
            "{label:<10} MRE {:.4e}  MSE {:.4e}  RMSE {:.4e}  R2 {}",
            r.mre,
            r.mse,
            r.rmse,
            r.r2.map_or("n/a".into(), |v| format!("{v:.6}"))
        ));
    }
}

fn example(b: &mut Bundle, cfg: &SystemConfig, dt: f64) -> CliResult<()> {
    let p = derive_params(cfg)?;
    b.config("config.json", cfg)?;
    let report = stability_report(&p);
    let path = output::write_text(&b.path("stability.txt"), &report)?;
    b.add(path);
    b.line(report.lines().next().unwrap_or_default());

    let s = spec(100.0, dt)?;
    let (full, analytic) = run_pair(cfg, ModelKind::Full, ModelKind::Analytic, &s)?;
    for t in [&full, &analytic] {
        let path = output::write_trajectory(&b.path(&format!("{}.csv", t.meta.model)), t, true)?;
        b.add(path);
    }
    let rows = window_reports(&full, &analytic, &[33.0, 66.0, 100.0])?;
    let path = output::write_errors(&b.path("errors.csv"), &rows)?;
    b.add(path);
    b.line(format!("analytic vs full, dt={dt}, momentum drift {:.3e}", full.momentum_drift()));
    error_lines(b, &rows);
    Ok(())
}

fn table1(b: &mut Bundle, dt: f64) -> CliResult<()> {
    let cfg = presets::example1();
    b.config("config.json", &cfg)?;
    let (full, analytic) = run_pair(&cfg, ModelKind::Full, ModelKind::Analytic, &spec(300.0, dt)?)?;
    let rows = window_reports(&full, &analytic, &[100.0, 200.0, 300.0])?;
    let path = output::write_errors(&b.path("errors.csv"), &rows)?;
    b.add(path);
    b.line(format!("Example 1, analytic vs full, dt={dt}"));
    error_lines(b, &rows);
    Ok(())
}

fn fig4(b: &mut Bundle) -> CliResult<()> {
    let cfg = presets::nutation_study();
    let p = derive_params(&cfg)?;
    let prof = nutation_profile(&p)?;
    b.config("config.json", &cfg)?;

    let (x, y, z) = FIG4_GRID;
    let grid = SweepGrid { ixx_aug: linspace(x), iyy: linspace(y), izz_aug: linspace(z) };
    let result = spinlab_core::analysis::nutation_sweep(&grid, p.gamma)?;
    let path = output::write_sweep(&b.path("sweep.csv"), &result.rows)?;
    b.add(path);

    // One turn of the slowest precession component closes the path.
    let slowest = prof.precession_freqs.iter().copied().fold(f64::INFINITY, f64::min);
    let period = std::f64::consts::TAU / slowest;
    let step = 0.05;
    let n = (period / step).floor() as usize;
    let mut rows = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let tau = k as f64 * step;
        let th = euler_angles_analytic(tau, &p)?;
        rows.push(vec![tau, th.x, th.z, prof.radius(tau)]);
    }
    let path = output::write_table(&b.path("precession.csv"), &["tau", "th_x", "th_z", "radius"], &rows)?;
    b.add(path);

    let (lo, hi) = prof.radius_band();
    b.line(format!("gamma={:e} lambda={:.6} epsilon={:e}", p.gamma, prof.lambda, prof.epsilon));
    b.line(format!("center (0, {:e}), radius band [{lo:e}, {hi:e}]", -prof.theta_z0));
    b.line(format!("A0={:e} A_max={:e} eps_n={:.6}", prof.a0, prof.a_max, prof.eps_n));
    b.line(format!("precession frequencies {:?}", prof.precession_freqs));
    b.line(format!("nutation frequencies {:?}", prof.nutation_freqs));
    b.line(format!("sweep: {} of {} grid points, {} skipped", result.rows.len(), grid.len(), result.skipped));
    Ok(())
}

fn fig5(b: &mut Bundle, dt: f64) -> CliResult<()> {
    let runs = [
        ("marginal", presets::marginal(), FIG5_MARGINAL_TAU),
        ("unstable", presets::unstable(), FIG5_UNSTABLE_TAU),
    ];
    for (name, cfg, tau_end) in runs {
        let p = derive_params(&cfg)?;
        b.config(&format!("config_{name}.json"), &cfg)?;
        let traj = run_model(&cfg, ModelKind::FirstOrder, &spec(tau_end, dt)?)?;
        let path = output::write_trajectory(&b.path(&format!("{name}_first.csv")), &traj, true)?;
        b.add(path);
        let fit = growth_envelope(&traj)?;
        let detail = match fit.growth {
            spinlab_core::analysis::Growth::Linear { slope } => format!("slope {slope:.4e}"),
            spinlab_core::analysis::Growth::Exponential { rate } => format!("rate {rate:.4e} (lambda {:.4e})", p.lambda),
            spinlab_core::analysis::Growth::Bounded => String::new(),
        };
        b.line(format!(
            "{name}: sigma={} tau_end={tau_end} growth {} {detail} R2 {:.4} over {} peaks",
            p.sigma,
            fit.growth.label(),
            fit.r2,
            fit.peaks
        ));
    }
    Ok(())
}
