//! Range specs: `name=min:max:count` or `name=value`, comma-separated.

use spinlab_core::analysis::SweepGrid;

use crate::error::{CliError, CliResult};

/// Inclusive range sampled at `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn linear(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|k| if k + 1 == self.count { self.max } else { self.min + step * k as f64 }).collect()
    }

    /// Log-spaced in magnitude; both ends must share a sign.
    pub fn logarithmic(&self) -> CliResult<Vec<f64>> {
        if self.min * self.max <= 0.0 {
            return Err(CliError::Usage(format!(
                "log range {}:{} must not include or cross zero",
                self.min, self.max
            )));
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        let sign = self.min.signum();
        let (a, b) = (self.min.abs().ln(), self.max.abs().ln());
        let step = (b - a) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|k| match k {
                0 => self.min,
                _ if k + 1 == self.count => self.max,
                _ => sign * (a + step * k as f64).exp(),
            })
            .collect())
    }
}

fn number(text: &str, what: &str) -> CliResult<f64> {
    let v: f64 = text.trim().parse().map_err(|_| CliError::Usage(format!("{what}: `{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("{what}: `{text}` is not finite")));
    }
    Ok(v)
}

/// Parses `min:max:count` or a single value; `min ≤ max` is required
/// (compared by magnitude when `by_magnitude`).
pub fn parse_range(text: &str, what: &str, by_magnitude: bool) -> CliResult<Range> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => {
            let v = number(v, what)?;
            Ok(Range { min: v, max: v, count: 1 })
        }
        [lo, hi, n] => {
            let (min, max) = (number(lo, what)?, number(hi, what)?);
            let count: usize = n
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{what}: count `{n}` is not a positive integer")))?;
            let ordered = if by_magnitude { min.abs() <= max.abs() } else { min <= max };
            if !ordered {
                return Err(CliError::Usage(format!("{what}: min {min} is greater than max {max}")));
            }
            if count == 0 || (count == 1 && min != max) {
                return Err(CliError::Usage(format!("{what}: count must be >= 2 for a non-degenerate range")));
            }
            Ok(Range { min, max, count })
        }
        _ => Err(CliError::Usage(format!("{what}: expected `min:max:count` or a single value, got `{text}`"))),
    }
}

/// `ixx_aug=..,iyy=..,izz_aug=..`; every axis must be given exactly once.
pub fn parse_grid(spec: &str) -> CliResult<SweepGrid> {
    let mut axes: [Option<Vec<f64>>; 3] = [None, None, None];
    const NAMES: [&str; 3] = ["ixx_aug", "iyy", "izz_aug"];
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, range) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("grid item `{item}` is not `name=min:max:count`")))?;
        let name = name.trim();
        let idx = NAMES.iter().position(|n| *n == name).ok_or_else(|| {
            CliError::Usage(format!("unknown grid axis `{name}` (expected ixx_aug, iyy, izz_aug)"))
        })?;
        if axes[idx].is_some() {
            return Err(CliError::Usage(format!("grid axis `{name}` given twice")));
        }
        axes[idx] = Some(parse_range(range, name, false)?.linear());
    }
    let [x, y, z] = axes;
    let missing = |i: usize| CliError::Usage(format!("grid axis `{}` is missing", NAMES[i]));
    Ok(SweepGrid { ixx_aug: x.ok_or_else(|| missing(0))?, iyy: y.ok_or_else(|| missing(1))?, izz_aug: z.ok_or_else(|| missing(2))? })
}

/// Comma-separated positive window bounds.
pub fn parse_windows(text: &str) -> CliResult<Vec<f64>> {
    let out = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(s, "windows"))
        .collect::<CliResult<Vec<f64>>>()?;
    if out.is_empty() {
        return Err(CliError::Usage("windows: empty list".into()));
    }
    if let Some(bad) = out.iter().find(|w| **w <= 0.0) {
        return Err(CliError::Usage(format!("windows: bound {bad} must be positive")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1:3:3", "x", false).unwrap().linear(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_range("5", "x", false).unwrap().linear(), vec![5.0]);
        assert!(parse_range("3:1:3", "x", false).is_err());
        assert!(parse_range("1:3:0", "x", false).is_err());
        assert!(parse_range("1:3", "x", false).is_err());
        assert!(parse_range("a:3:2", "x", false).is_err());
        let g = parse_range("-1e-4:-1e-2:3", "gamma", true).unwrap().logarithmic().unwrap();
        assert!((g[1] + 1e-3).abs() < 1e-15 && g[0] == -1e-4 && g[2] == -1e-2, "{g:?}");
        assert!(parse_range("-1:1:3", "gamma", true).unwrap().logarithmic().is_err());
    }

    #[test]
    fn grid() {
        let g = parse_grid("ixx_aug=101:103:3, iyy=2,izz_aug=103").unwrap();
        assert_eq!(g.ixx_aug, vec![101.0, 102.0, 103.0]);
        assert_eq!(g.len(), 3);
        assert!(parse_grid("ixx_aug=1,iyy=2").is_err());
        assert!(parse_grid("ixx_aug=1,iyy=2,izz_aug=3,iyy=4").is_err());
        assert!(parse_grid("ixx=1,iyy=2,izz_aug=3").is_err());
        assert!(parse_grid("ixx_aug=110:101:3,iyy=2,izz_aug=3").is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(parse_windows("33, 66,100").unwrap(), vec![33.0, 66.0, 100.0]);
        assert!(parse_windows("").is_err());
        assert!(parse_windows("10,-1").is_err());
    }
}
