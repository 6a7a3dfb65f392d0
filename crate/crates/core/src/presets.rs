//! Canonical configurations used by the reproduction targets and tests.
//!
//! Where a source configuration leaves the platform spin-axis inertia `Iby`
//! unstated it is set to [`DEFAULT_IBY`]; `Iby` only enters the y channel.

use crate::model::SystemConfig;

/// Spin-axis platform inertia used when a configuration does not state one.
pub const DEFAULT_IBY: f64 = 90.0;

fn build(ixx: f64, iyy: f64, izz: f64, ixy: f64, ibr: f64, iby: f64) -> SystemConfig {
    SystemConfig::from_inertias(ixx, iyy, izz, ixy, ibr, iby).expect("preset is valid")
}

/// Rotor that lost part of its mass at one end (stable, σ = −8000).
pub fn example1() -> SystemConfig {
    build(80.0, 80.0, 60.0, -0.1, 100.0, 90.0)
}

/// Deployed truss rotating on a large platform (stable, σ = −912000).
pub fn example2() -> SystemConfig {
    build(20.0, 60.0, 10.0, -1.0, 1000.0, 800.0)
}

/// Small rotor on a large platform used for the nutation study (σ = −9999, u1 = −1).
pub fn nutation_study() -> SystemConfig {
    build(1.0, 2.0, 3.0, -0.01, 100.0, DEFAULT_IBY)
}

/// `Izz′ = Iyy`: σ = 0, linear divergence.
pub fn marginal() -> SystemConfig {
    build(3.0, 102.0, 2.0, -0.01, 100.0, DEFAULT_IBY)
}

/// `Ixx′ < Iyy < Izz′`: σ = +1, exponential divergence.
pub fn unstable() -> SystemConfig {
    build(1.0, 102.0, 3.0, -0.01, 100.0, DEFAULT_IBY)
}

/// Looks a preset up by name.
pub fn by_name(name: &str) -> Option<SystemConfig> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "nutation" | "fig4" => Some(nutation_study()),
        "marginal" => Some(marginal()),
        "unstable" => Some(unstable()),
        _ => None,
    }
}
