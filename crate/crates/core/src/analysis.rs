//! Trajectory comparison, growth classification, spectra and the ε_n sweep.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::analytic::NutationProfile;
use crate::model::{LAMBDA_SQ_DEGENERATE, RESONANCE_TOL, SIGMA_REL_TOL};
use crate::propagate::Trajectory;
use crate::{Error, Result, Vec3};

/// Shortest series accepted by [`dominant_frequencies`].
pub const MIN_SPECTRUM_LEN: usize = 2048;

/// Minimum number of envelope peaks for [`growth_envelope`].
pub const MIN_PEAKS: usize = 10;

/// Agreement between a reference and a test trajectory.
///
/// MRE is the mean Euclidean deviation of ω̂ divided by the largest reference
/// norm in the window, so zero crossings of the reference do not blow it up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub mre: f64,
    pub mse: f64,
    pub rmse: f64,
    /// Pooled over the three components; `None` when the reference is
    /// constant and the test differs from it.
    pub r2: Option<f64>,
    pub r2_components: [Option<f64>; 3],
    pub n_samples: usize,
    pub window: (f64, f64),
}

fn r_squared(ss_res: f64, ss_tot: f64) -> Option<f64> {
    if ss_tot > 0.0 {
        Some(1.0 - ss_res / ss_tot)
    } else if ss_res == 0.0 {
        Some(1.0)
    } else {
        None
    }
}

/// Compares ω̂ of `test` against `reference` on samples with `lo ≤ τ ≤ hi`.
pub fn error_report(reference: &Trajectory, test: &Trajectory, window: (f64, f64)) -> Result<ErrorReport> {
    if (reference.dt - test.dt).abs() > 1e-12 * reference.dt {
        return Err(Error::GridMismatch(format!("dt {} vs {}", reference.dt, test.dt)));
    }
    let (lo, hi) = window;
    if !(lo <= hi) {
        return Err(Error::invalid("window", format!("empty range [{lo}, {hi}]")));
    }
    let slack = 1e-9 * reference.dt;
    let mut pairs = Vec::new();
    for (i, r) in reference.samples.iter().enumerate() {
        if r.tau < lo - slack || r.tau > hi + slack {
            continue;
        }
        let t = test
            .samples
            .get(i)
            .ok_or_else(|| Error::GridMismatch(format!("test trajectory has no sample at tau = {}", r.tau)))?;
        if (t.tau - r.tau).abs() > slack {
            return Err(Error::GridMismatch(format!("sample {i}: tau {} vs {}", r.tau, t.tau)));
        }
        pairs.push((r.omega, t.omega));
    }
    let mut report = error_metrics(&pairs)?;
    report.window = window;
    Ok(report)
}

/// Metrics over `(reference, test)` pairs; the window is left at `(0, 0)`.
pub fn error_metrics(pairs: &[(Vec3, Vec3)]) -> Result<ErrorReport> {
    if pairs.is_empty() {
        return Err(Error::InsufficientData("no samples inside the comparison window".into()));
    }
    let n = pairs.len() as f64;
    let mean: Vec3 = pairs.iter().map(|(r, _)| r).sum::<Vec3>() / n;
    let mut ss_res = Vec3::zeros();
    let mut ss_tot = Vec3::zeros();
    let mut dev_sum = 0.0;
    let mut ref_peak = 0.0f64;
    for (r, t) in pairs {
        let d = t - r;
        ss_res += d.component_mul(&d);
        let c = r - mean;
        ss_tot += c.component_mul(&c);
        dev_sum += d.norm();
        ref_peak = ref_peak.max(r.norm());
    }
    let mse = ss_res.sum() / (3.0 * n);
    let mean_dev = dev_sum / n;
    let mre = if ref_peak > 0.0 {
        mean_dev / ref_peak
    } else if mean_dev == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ErrorReport {
        mre,
        mse,
        rmse: mse.sqrt(),
        r2: r_squared(ss_res.sum(), ss_tot.sum()),
        r2_components: [0, 1, 2].map(|k| r_squared(ss_res[k], ss_tot[k])),
        n_samples: pairs.len(),
        window: (0.0, 0.0),
    })
}

/// Long-run behavior of an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Growth {
    Bounded,
    /// Peaks grow like `slope·τ`.
    Linear { slope: f64 },
    /// Peaks grow like `exp(rate·τ)`.
    Exponential { rate: f64 },
}

impl Growth {
    pub fn label(&self) -> &'static str {
        match self {
            Growth::Bounded => "Bounded",
            Growth::Linear { .. } => "Linear",
            Growth::Exponential { .. } => "Exponential",
        }
    }
}

/// Classification together with the quality of the winning fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub growth: Growth,
    /// R² of the chosen fit (1 for `Bounded`).
    pub r2: f64,
    pub peaks: usize,
}

/// Least-squares line `y = a + b·x`; returns `(a, b, R²)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (my - slope * mx, slope, r2)
}

/// Local maxima of `values` (ties resolved to the first sample of a plateau).
fn peaks(times: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut t = Vec::new();
    let mut v = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        if values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] > 0.0 {
            t.push(times[i]);
            v.push(values[i]);
        }
    }
    (t, v)
}

/// Classifies the peak envelope of a non-negative series.
///
/// Bounded when the largest peak of the last third does not exceed 1.5× the
/// largest peak of the first third. Otherwise the better of a linear fit and a
/// log-linear fit over all peaks wins; the exponential rate is refitted on the
/// later half of the peaks, past the polynomial start-up transient.
pub fn growth_envelope_series(times: &[f64], values: &[f64]) -> Result<GrowthFit> {
    if times.len() != values.len() {
        return Err(Error::GridMismatch(format!("{} times vs {} values", times.len(), values.len())));
    }
    let (pt, pv) = peaks(times, values);
    if pt.len() < MIN_PEAKS {
        return Err(Error::InsufficientData(format!("{} envelope peaks, need {MIN_PEAKS}", pt.len())));
    }
    let third = pt.len() / 3;
    let max_of = |s: &[f64]| s.iter().copied().fold(0.0, f64::max);
    if max_of(&pv[pv.len() - third..]) <= 1.5 * max_of(&pv[..third]) {
        return Ok(GrowthFit { growth: Growth::Bounded, r2: 1.0, peaks: pt.len() });
    }
    let logs: Vec<f64> = pv.iter().map(|v| v.ln()).collect();
    let (_, slope, r2_lin) = line_fit(&pt, &pv);
    let (_, _, r2_log) = line_fit(&pt, &logs);
    let fit = if r2_log > r2_lin {
        let half = pt.len() / 2;
        let (_, rate, r2) = line_fit(&pt[half..], &logs[half..]);
        GrowthFit { growth: Growth::Exponential { rate }, r2, peaks: pt.len() }
    } else {
        GrowthFit { growth: Growth::Linear { slope }, r2: r2_lin, peaks: pt.len() }
    };
    Ok(fit)
}

/// Growth of the `|ω̂x|` peak envelope of a trajectory.
///
/// `|ω̂x|` is used rather than `‖(ω̂x, ω̂z)‖` because in the marginal and
/// exponential regimes that norm grows monotonically and has no peaks.
pub fn growth_envelope(traj: &Trajectory) -> Result<GrowthFit> {
    let times = traj.times();
    let values: Vec<f64> = traj.samples.iter().map(|s| s.omega.x.abs()).collect();
    growth_envelope_series(&times, &values)
}

/// Half-width, in bins, of the neighborhood a spectral peak must dominate.
const PEAK_NEIGHBORHOOD: usize = 3;

/// The `k` strongest spectral lines of a uniformly sampled series, as angular
/// frequencies (τ⁻¹), strongest first.
///
/// The mean is removed and a Hann window applied; each line is refined by a
/// parabola through the log-power of its bin and the two neighbors. A bin
/// counts as a line only if it is the maximum over ±3 bins, which keeps Hann
/// sidelobes of strong lines from masking weak ones.
pub fn dominant_frequencies(series: &[f64], dt: f64, k: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n < MIN_SPECTRUM_LEN {
        return Err(Error::InsufficientData(format!("series of length {n}, need {MIN_SPECTRUM_LEN}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / (n - 1) as f64).cos();
            Complex::new((v - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf[..n / 2 + 1].iter().map(|c| c.norm_sqr()).collect();

    let mut lines: Vec<(usize, f64)> = (1..power.len() - 1)
        .filter(|&i| {
            let lo = i.saturating_sub(PEAK_NEIGHBORHOOD);
            let hi = (i + PEAK_NEIGHBORHOOD).min(power.len() - 1);
            power[i] > 0.0 && (lo..=hi).all(|j| j == i || power[j] < power[i])
        })
        .map(|i| (i, power[i]))
        .collect();
    lines.sort_by(|a, b| b.1.total_cmp(&a.1));

    let bin_width = std::f64::consts::TAU / (n as f64 * dt);
    Ok(lines
        .into_iter()
        .take(k)
        .map(|(i, _)| {
            let (a, b, c) = (power[i - 1].ln(), power[i].ln(), power[i + 1].ln());
            let denom = a - 2.0 * b + c;
            let delta = if denom.is_finite() && denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            (i as f64 + delta.clamp(-0.5, 0.5)) * bin_width
        })
        .collect())
}

/// Axis values of an ε_n sweep over augmented inertias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub ixx_aug: Vec<f64>,
    pub iyy: Vec<f64>,
    pub izz_aug: Vec<f64>,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.ixx_aug.len() * self.iyy.len() * self.izz_aug.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point `index` in `ixx_aug`-major, `izz_aug`-minor order.
    pub fn point(&self, index: usize) -> (f64, f64, f64) {
        let nz = self.izz_aug.len();
        let ny = self.iyy.len();
        let (i, rest) = (index / (ny * nz), index % (ny * nz));
        (self.ixx_aug[i], self.iyy[rest / nz], self.izz_aug[rest % nz])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ixx_aug: f64,
    pub iyy: f64,
    pub izz_aug: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub eps_n: f64,
    pub theta_z0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Grid points left out: σ ≥ 0, λ degenerate or resonant.
    pub skipped: usize,
}

fn sweep_point(ixx_aug: f64, iyy: f64, izz_aug: f64, gamma: f64) -> Option<SweepRow> {
    let sigma = -(iyy - ixx_aug) * (iyy - izz_aug);
    if sigma >= -SIGMA_REL_TOL * ixx_aug * izz_aug {
        return None;
    }
    let u1 = (iyy - izz_aug) / ixx_aug;
    let u2 = (ixx_aug - iyy) / izz_aug;
    let lambda_sq = -u1 * u2;
    if lambda_sq < LAMBDA_SQ_DEGENERATE || (lambda_sq.sqrt() - 1.0).abs() < RESONANCE_TOL {
        return None;
    }
    let profile = NutationProfile::from_rates(u1, u2, gamma).ok()?;
    Some(SweepRow {
        ixx_aug,
        iyy,
        izz_aug,
        sigma,
        lambda: profile.lambda,
        eps_n: profile.eps_n,
        theta_z0: profile.theta_z0,
    })
}

/// ε_n over every stable grid point, in grid order.
pub fn nutation_sweep(grid: &SweepGrid, gamma: f64) -> Result<SweepResult> {
    for (name, axis) in [("ixx_aug", &grid.ixx_aug), ("iyy", &grid.iyy), ("izz_aug", &grid.izz_aug)] {
        if let Some(bad) = axis.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::invalid(name, format!("grid values must be positive, got {bad}")));
        }
    }
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma", format!("must be finite, got {gamma}")));
    }
    let cells: Vec<Option<SweepRow>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (x, y, z) = grid.point(i);
            sweep_point(x, y, z, gamma)
        })
        .collect();
    let skipped = cells.iter().filter(|c| c.is_none()).count();
    let rows: Vec<SweepRow> = cells.into_iter().flatten().collect();
    if rows.is_empty() {
        return Err(Error::EmptyStableSubset);
    }
    Ok(SweepResult { rows, skipped })
}
