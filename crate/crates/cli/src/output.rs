//! Atomic file output and the CSV schemas.

use std::io::Write;
use std::path::{Path, PathBuf};

use spinlab_core::analysis::{ErrorReport, SweepRow};
use spinlab_core::propagate::Trajectory;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

pub const TRAJECTORY_HEADER: [&str; 14] =
    ["tau", "wx", "wy", "wz", "qw", "qx", "qy", "qz", "th_x", "th_y", "th_z", "Hx", "Hy", "Hz"];

pub const SWEEP_HEADER: [&str; 6] = ["ixx_aug", "iyy", "izz_aug", "sigma", "lambda", "eps_n"];

pub const ERROR_HEADER: [&str; 11] =
    ["window_lo", "window_hi", "n_samples", "mre", "mse", "rmse", "r2", "r2_x", "r2_y", "r2_z", "label"];

/// Nine significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.8e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "nan".into())
}

/// Creates `dir` if needed.
pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes `path` through a temporary file in the same directory and a rename,
/// so readers never observe a partial file.
pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult<PathBuf>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    ensure_dir(dir)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    // Temp files are created owner-only; published files get the usual mode.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(|e| CliError::io(dir, e))?;
    }
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut buf)?;
        buf.flush().map_err(|e| CliError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(path.to_path_buf())
}

pub fn write_text(path: &Path, text: &str) -> CliResult<PathBuf> {
    write_atomic(path, |w| w.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e)))
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> CliResult<PathBuf>
where
    I: IntoIterator<Item = Vec<String>>,
{
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(header)?;
        for row in rows {
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| CliError::io(path, e))?;
        Ok(())
    })
}

/// Trajectory CSV; `seconds` appends physical time `τ/|Ω|` as column `t`.
pub fn write_trajectory(path: &Path, traj: &Trajectory, seconds: bool) -> CliResult<PathBuf> {
    let momentum = traj.momentum();
    let omega_mag = traj.meta.config.omega_mag;
    let mut header = TRAJECTORY_HEADER.to_vec();
    if seconds {
        header.push("t");
    }
    let rows = traj.samples.iter().zip(momentum).map(|(s, h)| {
        let mut row: Vec<String> = [s.tau]
            .into_iter()
            .chain(s.omega.iter().copied())
            .chain([s.quat.w, s.quat.i, s.quat.j, s.quat.k])
            .chain(s.euler.iter().copied())
            .chain(h.iter().copied())
            .map(num)
            .collect();
        if seconds {
            row.push(num(s.tau / omega_mag));
        }
        row
    });
    write_csv(path, &header, rows)
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> CliResult<PathBuf> {
    write_csv(
        path,
        &SWEEP_HEADER,
        rows.iter().map(|r| [r.ixx_aug, r.iyy, r.izz_aug, r.sigma, r.lambda, r.eps_n].map(num).to_vec()),
    )
}

/// Error table; `label` tags each row (e.g. the window name or γ value).
pub fn write_errors(path: &Path, rows: &[(String, ErrorReport)]) -> CliResult<PathBuf> {
    write_csv(
        path,
        &ERROR_HEADER,
        rows.iter().map(|(label, r)| {
            vec![
                num(r.window.0),
                num(r.window.1),
                r.n_samples.to_string(),
                num(r.mre),
                num(r.mse),
                num(r.rmse),
                opt(r.r2),
                opt(r.r2_components[0]),
                opt(r.r2_components[1]),
                opt(r.r2_components[2]),
                label.clone(),
            ]
        }),
    )
}

/// Generic numeric table.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> CliResult<PathBuf> {
    write_csv(path, header, rows.iter().map(|r| r.iter().copied().map(num).collect()))
}
