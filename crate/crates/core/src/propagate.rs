//! Trajectory generation: one [`Propagator`] per angular-velocity model,
//! all sharing the same attitude kinematics.
//!
//! The integrated state is `[ω̂ (3), quaternion w,x,y,z (4), θ (3)]`. The
//! first-order model integrates `ω̂⁽¹⁾` in the first three slots and feeds the
//! physical reconstruction `diag(γ, γ², γ)·ω̂⁽¹⁾` to the kinematics; the
//! analytic model has no velocity state and evaluates the closed form instead.

use std::fmt;
use std::str::FromStr;

use crate::analytic::omega_analytic_with;
use crate::dynamics::{angular_momentum_inertial, euler_rate, quaternion_rate, rhs_first_order, rhs_full, BodyState};
use crate::integrate::{integrate_with, Drive, FnSystem, Rk4, Stepper};
use crate::model::{derive_params, DerivedParams, SystemConfig};
use crate::registry::{Named, Registry};
use crate::{Error, Quat, Result, Vec3};

/// Angular-velocity model used to drive a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Full,
    FirstOrder,
    Analytic,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Full, ModelKind::FirstOrder, ModelKind::Analytic];

    /// Registry name, also the command-line spelling.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Full => "full",
            ModelKind::FirstOrder => "first",
            ModelKind::Analytic => "analytic",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| Error::UnknownEntry {
            kind: "model",
            name: s.to_string(),
            available: "full, first, analytic".into(),
        })
    }
}

/// Provenance of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub config: SystemConfig,
    pub model: &'static str,
    pub integrator: &'static str,
    pub tau_end: f64,
}

/// Uniformly sampled platform motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub samples: Vec<BodyState>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.tau).collect()
    }

    pub fn omegas(&self) -> Vec<Vec3> {
        self.samples.iter().map(|s| s.omega).collect()
    }

    /// Inertial-frame angular momentum at every sample.
    pub fn momentum(&self) -> Vec<Vec3> {
        self.samples
            .iter()
            .map(|s| angular_momentum_inertial(s.tau, &s.omega, &s.quat, &self.meta.config))
            .collect()
    }

    /// Largest `|H(τ) − H(0)| / |H(0)|` along the trajectory.
    pub fn momentum_drift(&self) -> f64 {
        let h = self.momentum();
        let Some(h0) = h.first().copied() else { return 0.0 };
        let scale = h0.norm().max(f64::MIN_POSITIVE);
        h.iter().map(|v| (v - h0).norm() / scale).fold(0.0, f64::max)
    }
}

/// A way of turning a configuration into a trajectory.
pub trait Propagator: Named + Send + Sync {
    fn run(&self, cfg: &SystemConfig, tau_end: f64, dt: f64, stepper: &dyn Stepper) -> Result<Trajectory>;
}

const DIM: usize = 10;

fn initial_state(omega: Vec3) -> [f64; DIM] {
    let mut y = [0.0; DIM];
    y[..3].copy_from_slice(omega.as_slice());
    y[3] = 1.0;
    y
}

fn attitude_rates(y: &[f64], omega: &Vec3, d: &mut [f64]) {
    let q = Quat::new(y[3], y[4], y[5], y[6]);
    let theta = Vec3::new(y[7], y[8], y[9]);
    let qd = quaternion_rate(&q, omega);
    d[3..7].copy_from_slice(&[qd.w, qd.i, qd.j, qd.k]);
    d[7..10].copy_from_slice(euler_rate(&theta, omega).as_slice());
}

fn renormalize_quaternion(y: &mut [f64]) {
    let n = (y[3] * y[3] + y[4] * y[4] + y[5] * y[5] + y[6] * y[6]).sqrt();
    if n > 0.0 {
        y[3..7].iter_mut().for_each(|v| *v /= n);
    }
}

fn physical(w1: &Vec3, gamma: f64) -> Vec3 {
    Vec3::new(gamma * w1.x, gamma * gamma * w1.y, gamma * w1.z)
}

fn require_rest(cfg: &SystemConfig, model: &str) -> Result<()> {
    if cfg.initial_omega != [0.0; 3] {
        return Err(Error::invalid(
            "initial_omega",
            format!("the {model} model expands about a platform at rest; initial_omega must be zero"),
        ));
    }
    Ok(())
}

/// Runs `rhs` over the uniform grid and unpacks the samples.
fn drive<F>(
    cfg: &SystemConfig,
    model: &'static str,
    y0: [f64; DIM],
    tau_end: f64,
    dt: f64,
    stepper: &dyn Stepper,
    rhs: F,
    omega_at: impl Fn(f64, &[f64]) -> Result<Vec3>,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let sys = FnSystem::new(DIM, rhs);
    let hook = renormalize_quaternion;
    let options = Drive { stepper, post_step: Some(&hook), include_end: false };
    let sol = integrate_with(&sys, &y0, tau_end, dt, &options)?;
    let samples = sol
        .times
        .iter()
        .zip(&sol.states)
        .map(|(&tau, y)| {
            Ok(BodyState {
                tau,
                omega: omega_at(tau, y)?,
                quat: Quat::new(y[3], y[4], y[5], y[6]),
                euler: Vec3::new(y[7], y[8], y[9]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        dt,
        samples,
        meta: TrajectoryMeta { config: *cfg, model, integrator: stepper.name(), tau_end },
    })
}

/// The nonlinear attitude equation.
pub struct FullModel;

impl Named for FullModel {
    fn name(&self) -> &'static str {
        "full"
    }
    fn describe(&self) -> &'static str {
        "full nonlinear attitude equation"
    }
}

impl Propagator for FullModel {
    fn run(&self, cfg: &SystemConfig, tau_end: f64, dt: f64, stepper: &dyn Stepper) -> Result<Trajectory> {
        cfg.validate()?;
        let rhs = |tau: f64, y: &[f64], d: &mut [f64]| {
            let w = Vec3::new(y[0], y[1], y[2]);
            d[..3].copy_from_slice(rhs_full(tau, &w, cfg)?.as_slice());
            attitude_rates(y, &w, d);
            Ok(())
        };
        let omega_at = |_: f64, y: &[f64]| Ok(Vec3::new(y[0], y[1], y[2]));
        drive(cfg, self.name(), initial_state(cfg.initial_omega()), tau_end, dt, stepper, rhs, omega_at)
    }
}

/// Numerical integration of the first-order reduced system.
pub struct FirstOrderModel;

impl Named for FirstOrderModel {
    fn name(&self) -> &'static str {
        "first"
    }
    fn describe(&self) -> &'static str {
        "first-order reduced system, integrated"
    }
}

impl Propagator for FirstOrderModel {
    fn run(&self, cfg: &SystemConfig, tau_end: f64, dt: f64, stepper: &dyn Stepper) -> Result<Trajectory> {
        require_rest(cfg, self.name())?;
        let p = derive_params(cfg)?;
        let rhs = |tau: f64, y: &[f64], d: &mut [f64]| {
            let w1 = Vec3::new(y[0], y[1], y[2]);
            d[..3].copy_from_slice(rhs_first_order(tau, &w1, &p).as_slice());
            attitude_rates(y, &physical(&w1, p.gamma), d);
            Ok(())
        };
        let omega_at = |_: f64, y: &[f64]| Ok(physical(&Vec3::new(y[0], y[1], y[2]), p.gamma));
        drive(cfg, self.name(), initial_state(Vec3::zeros()), tau_end, dt, stepper, rhs, omega_at)
    }
}

/// Closed-form first-order angular velocity with integrated attitude.
pub struct AnalyticModel;

impl Named for AnalyticModel {
    fn name(&self) -> &'static str {
        "analytic"
    }
    fn describe(&self) -> &'static str {
        "closed-form first-order solution"
    }
}

impl Propagator for AnalyticModel {
    fn run(&self, cfg: &SystemConfig, tau_end: f64, dt: f64, stepper: &dyn Stepper) -> Result<Trajectory> {
        require_rest(cfg, self.name())?;
        let p: DerivedParams = derive_params(cfg)?;
        let rhs = |tau: f64, y: &[f64], d: &mut [f64]| {
            d[..3].fill(0.0);
            attitude_rates(y, &omega_analytic_with(tau, &p)?, d);
            Ok(())
        };
        let omega_at = |tau: f64, _: &[f64]| omega_analytic_with(tau, &p);
        drive(cfg, self.name(), initial_state(Vec3::zeros()), tau_end, dt, stepper, rhs, omega_at)
    }
}

/// All built-in propagators, keyed by [`ModelKind::name`].
pub fn model_registry() -> Registry<dyn Propagator> {
    let mut reg: Registry<dyn Propagator> = Registry::new("model");
    reg.register(Box::new(FullModel)).expect("unique");
    reg.register(Box::new(FirstOrderModel)).expect("unique");
    reg.register(Box::new(AnalyticModel)).expect("unique");
    reg
}

/// Propagates `cfg` with the chosen model and classical RK4.
pub fn propagate(cfg: &SystemConfig, model: ModelKind, tau_end: f64, dt: f64) -> Result<Trajectory> {
    model_registry().get(model.name())?.run(cfg, tau_end, dt, &Rk4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::rotor_rotation;
    use crate::presets;

    #[test]
    fn model_names_round_trip() {
        for m in ModelKind::ALL {
            assert_eq!(m.name().parse::<ModelKind>().unwrap(), m);
        }
        assert!("euler".parse::<ModelKind>().is_err());
        assert_eq!(model_registry().names(), vec!["analytic", "first", "full"]);
    }

    #[test]
    fn balanced_platform_stays_at_rest() {
        let cfg = presets::example1().with_ixy(0.0);
        for m in ModelKind::ALL {
            let traj = propagate(&cfg, m, 20.0, 0.01).unwrap();
            assert_eq!(traj.len(), 2001);
            for s in &traj.samples {
                assert_eq!(s.omega, Vec3::zeros(), "{m}");
                assert_eq!(s.quat, Quat::identity());
            }
        }
    }

    #[test]
    fn sample_count_is_floor_plus_one() {
        let cfg = presets::example2();
        let traj = propagate(&cfg, ModelKind::Analytic, 10.05, 0.1).unwrap();
        assert_eq!(traj.len(), 101);
        assert_eq!(traj.samples.last().unwrap().tau, 10.0);
        assert_eq!(traj.meta.model, "analytic");
        assert_eq!(traj.meta.integrator, "rk4");
    }

    #[test]
    fn quaternion_stays_unit() {
        let traj = propagate(&presets::example2(), ModelKind::Full, 50.0, 1e-2).unwrap();
        for s in &traj.samples {
            assert!((s.quat.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_spin_about_y_matches_rotor_rotation() {
        let sys = FnSystem::new(4, |_, y: &[f64], d: &mut [f64]| {
            let q = Quat::new(y[0], y[1], y[2], y[3]);
            let r = quaternion_rate(&q, &Vec3::new(0.0, 1.0, 0.0));
            d.copy_from_slice(&[r.w, r.i, r.j, r.k]);
            Ok(())
        });
        let sol = crate::integrate::integrate_ode(&sys, &[1.0, 0.0, 0.0, 0.0], std::f64::consts::PI, 1e-3).unwrap();
        let y = sol.states.last().unwrap();
        let m = crate::dynamics::quat_to_matrix(&Quat::new(y[0], y[1], y[2], y[3]));
        assert!((m - rotor_rotation(std::f64::consts::PI)).abs().max() < 1e-9);
    }

    #[test]
    fn first_order_rejects_nonzero_start() {
        let mut cfg = presets::example1();
        cfg.initial_omega = [0.0, 1e-3, 0.0];
        assert!(propagate(&cfg, ModelKind::FirstOrder, 1.0, 0.1).is_err());
        assert!(propagate(&cfg, ModelKind::Full, 1.0, 0.1).is_ok());
    }

    #[test]
    fn unstable_first_order_run_stays_finite() {
        let cfg = presets::unstable();
        let traj = propagate(&cfg, ModelKind::FirstOrder, 200.0, 0.01).unwrap();
        assert!(traj.samples.iter().all(|s| s.omega.iter().all(|v| v.is_finite())));
    }
}
