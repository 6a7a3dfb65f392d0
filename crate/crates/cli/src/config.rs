//! JSON configuration files.
//!
//! ```json
//! { "ixx": 80, "iyy": 80, "izz": 60, "ixy": -0.1, "ibr": 100, "iby": 90,
//!   "omega_mag": 1.0, "initial_omega": [0, 0, 0] }
//! ```
//!
//! `iby`, `omega_mag` and `initial_omega` are optional.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use spinlab_core::model::{PlatformInertia, SpinInertia, SystemConfig, DEFAULT_OMEGA_MAG};
use spinlab_core::presets::DEFAULT_IBY;

use crate::error::{CliError, CliResult};

const FIELDS: [&str; 8] = ["ixx", "iyy", "izz", "ixy", "ibr", "iby", "omega_mag", "initial_omega"];

#[derive(Serialize)]
struct ConfigFile {
    ixx: f64,
    iyy: f64,
    izz: f64,
    ixy: f64,
    ibr: f64,
    iby: f64,
    omega_mag: f64,
    initial_omega: [f64; 3],
}

pub fn load(path: &Path) -> CliResult<SystemConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> CliResult<SystemConfig> {
    let field_err = |field: &str, reason: String| CliError::ConfigField {
        path: path.to_path_buf(),
        field: field.to_string(),
        reason,
    };
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Config { path: path.to_path_buf(), reason: format!("not valid JSON: {e}") })?;
    let Value::Object(obj) = value else {
        return Err(CliError::Config { path: path.to_path_buf(), reason: "top level must be a JSON object".into() });
    };
    if let Some(unknown) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(field_err(unknown, format!("unknown field (expected one of {})", FIELDS.join(", "))));
    }

    let number = |obj: &Map<String, Value>, name: &str| -> CliResult<Option<f64>> {
        match obj.get(name) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| field_err(name, format!("expected a number, got {v}"))),
        }
    };
    let required = |name: &str| -> CliResult<f64> {
        number(&obj, name)?.ok_or_else(|| field_err(name, "missing required field".into()))
    };

    let spin = SpinInertia { ixx: required("ixx")?, iyy: required("iyy")?, izz: required("izz")?, ixy: required("ixy")? };
    let platform = PlatformInertia { ibr: required("ibr")?, iby: number(&obj, "iby")?.unwrap_or(DEFAULT_IBY) };
    let omega_mag = number(&obj, "omega_mag")?.unwrap_or(DEFAULT_OMEGA_MAG);
    let initial_omega = match obj.get("initial_omega") {
        None => [0.0; 3],
        Some(Value::Array(items)) if items.len() == 3 => {
            let mut out = [0.0; 3];
            for (slot, item) in out.iter_mut().zip(items) {
                *slot = item
                    .as_f64()
                    .ok_or_else(|| field_err("initial_omega", format!("expected numbers, got {item}")))?;
            }
            out
        }
        Some(v) => return Err(field_err("initial_omega", format!("expected an array of 3 numbers, got {v}"))),
    };

    let cfg = SystemConfig { spin, platform, omega_mag, initial_omega };
    cfg.validate().map_err(|e| match e {
        spinlab_core::Error::InvalidParameter { name, reason } => field_err(name, reason),
        other => CliError::Core(other),
    })?;
    Ok(cfg)
}

/// Pretty JSON that [`parse`] reads back to an identical configuration.
pub fn to_json(cfg: &SystemConfig) -> String {
    let file = ConfigFile {
        ixx: cfg.spin.ixx,
        iyy: cfg.spin.iyy,
        izz: cfg.spin.izz,
        ixy: cfg.spin.ixy,
        ibr: cfg.platform.ibr,
        iby: cfg.platform.iby,
        omega_mag: cfg.omega_mag,
        initial_omega: cfg.initial_omega,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("plain numbers serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use spinlab_core::presets;

    fn p() -> &'static Path {
        Path::new("test.json")
    }

    #[test]
    fn round_trip() {
        let mut cfg = presets::example2();
        cfg.initial_omega = [1e-3, -2.5e-4, 0.1];
        cfg.omega_mag = 2.0 / 3.0;
        assert_eq!(parse(&to_json(&cfg), p()).unwrap(), cfg);
    }

    #[test]
    fn optional_fields_default() {
        let cfg = parse(r#"{"ixx": 1, "iyy": 2, "izz": 3, "ixy": -0.01, "ibr": 100}"#, p()).unwrap();
        assert_eq!(cfg.platform.iby, DEFAULT_IBY);
        assert_eq!(cfg.omega_mag, 1.0);
        assert_eq!(cfg.initial_omega, [0.0; 3]);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"ixx": 0, "iyy": 2, "izz": 3, "ixy": 0, "ibr": 100}"#, "ixx"),
            (r#"{"iyy": 2, "izz": 3, "ixy": 0, "ibr": 100}"#, "ixx"),
            (r#"{"ixx": 1, "iyy": "2", "izz": 3, "ixy": 0, "ibr": 100}"#, "iyy"),
            (r#"{"ixx": 1, "iyy": 2, "izz": 3, "ixy": 0, "ibr": 100, "izx": 1}"#, "izx"),
            (r#"{"ixx": 1, "iyy": 2, "izz": 3, "ixy": 0, "ibr": 100, "initial_omega": [0, 0]}"#, "initial_omega"),
            (r#"{"ixx": 1, "iyy": 2, "izz": 3, "ixy": 0, "ibr": 100, "omega_mag": -1}"#, "omega_mag"),
        ];
        for (text, field) in cases {
            match parse(text, p()) {
                Err(CliError::ConfigField { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(parse("[1, 2]", p()), Err(CliError::Config { .. })));
        assert!(matches!(parse("{", p()), Err(CliError::Config { .. })));
    }
}
