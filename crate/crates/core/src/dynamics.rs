//! Right-hand sides: time-varying inertia, the nonlinear attitude equation,
//! its first-order reduction, and attitude kinematics.
//!
//! Time is the dimensionless `τ = |Ω|·t`; angular velocities are scaled by
//! `|Ω|`. The rotor spins about the platform `y` axis, `Ω₀ = (0, 1, 0)`.

use crate::model::{DerivedParams, SystemConfig};
use crate::{Error, Mat3, Quat, Result, Vec3};

/// Unit relative spin direction of the rotor in the platform frame.
pub const SPIN_AXIS: [f64; 3] = [0.0, 1.0, 0.0];

/// Above this 1-norm condition estimate the total inertia is treated as singular.
pub const MAX_INERTIA_CONDITION: f64 = 1e12;

fn spin_axis() -> Vec3 {
    Vec3::from(SPIN_AXIS)
}

/// Instantaneous state of the platform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub tau: f64,
    /// Dimensionless platform angular velocity (platform frame).
    pub omega: Vec3,
    /// Unit quaternion rotating platform-frame vectors into the inertial frame.
    pub quat: Quat,
    /// Small-angle Z-Y-X Euler triple (θx, θy, θz), rad.
    pub euler: Vec3,
}

/// Rotation of the rotor frame relative to the platform: a turn by `τ` about `y`.
pub fn rotor_rotation(tau: f64) -> Mat3 {
    let (s, c) = tau.sin_cos();
    Mat3::new(
        c, 0.0, s, //
        0.0, 1.0, 0.0, //
        -s, 0.0, c,
    )
}

/// Analytic τ-derivative of [`rotor_rotation`].
pub fn rotor_rotation_rate(tau: f64) -> Mat3 {
    let (s, c) = tau.sin_cos();
    Mat3::new(
        -s, 0.0, c, //
        0.0, 0.0, 0.0, //
        -c, 0.0, -s,
    )
}

/// Equivalent spin inertia in the platform frame and its τ-derivative.
pub fn spin_inertia_at(tau: f64, spin: &crate::model::SpinInertia) -> (Mat3, Mat3) {
    let c = spin.matrix();
    let t = rotor_rotation(tau);
    let t_dot = rotor_rotation_rate(tau);
    let tc = t * c;
    let i1 = tc * t.transpose();
    let cross = t_dot * c * t.transpose();
    // Ṫ·C·Tᵀ + T·C·Ṫᵀ, the second term being the transpose of the first.
    let i1_dot = cross + cross.transpose();
    (i1, i1_dot)
}

/// Full nonlinear dimensionless attitude equation.
pub fn rhs_full(tau: f64, omega: &Vec3, cfg: &SystemConfig) -> Result<Vec3> {
    let (i1, i1_dot) = spin_inertia_at(tau, &cfg.spin);
    let ib = cfg.platform.matrix();
    let total = i1 + ib;
    let inv = invert_checked(&total, tau)?;

    let abs_rate = omega + spin_axis();
    let i1_abs = i1 * abs_rate;
    let torque = i1_dot * abs_rate + omega.cross(&i1_abs) + omega.cross(&(ib * omega));
    Ok(-(inv * torque))
}

fn invert_checked(m: &Mat3, tau: f64) -> Result<Mat3> {
    let singular = |condition| Error::SingularInertia { tau, condition };
    let inv = m.try_inverse().ok_or_else(|| singular(f64::INFINITY))?;
    let condition = norm1(m) * norm1(&inv);
    if !condition.is_finite() || condition > MAX_INERTIA_CONDITION {
        return Err(singular(condition));
    }
    Ok(inv)
}

fn norm1(m: &Mat3) -> f64 {
    m.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max)
}

/// First-order reduced system in the perturbation variables `ω̂⁽¹⁾`.
///
/// The x–z rows are linear with period-π coefficients and unit forcing
/// `(sin τ, cos τ)`; the y row is driven by the x–z solution.
pub fn rhs_first_order(tau: f64, w1: &Vec3, p: &DerivedParams) -> Vec3 {
    let (x, z) = (w1.x, w1.z);
    let (s1, c1) = tau.sin_cos();
    let (s2, c2) = (2.0 * tau).sin_cos();
    let ab = p.alpha + p.beta;
    Vec3::new(
        p.alpha * s2 * x + (p.alpha * c2 + ab) * z + s1,
        p.c1 * (2.0 * c2 * x * z + s2 * (x * x - z * z)) + p.c2 * (s1 * x + c1 * z),
        (p.alpha * c2 - ab) * x - p.alpha * s2 * z + c1,
    )
}

/// Small-angle Euler rates.
pub fn euler_rate(theta: &Vec3, omega: &Vec3) -> Vec3 {
    Vec3::new(omega.x, omega.y + theta.y * omega.z, omega.z)
}

/// Quaternion kinematics `q̇ = ½·q ⊗ (0, ω)` with `ω` in the platform frame.
pub fn quaternion_rate(quat: &Quat, omega: &Vec3) -> Quat {
    let pure = Quat::from_parts(0.0, *omega);
    (quat * pure) * 0.5
}

/// Rotation matrix of a (not necessarily normalized) quaternion.
pub fn quat_to_matrix(q: &Quat) -> Mat3 {
    nalgebra::UnitQuaternion::from_quaternion(*q).to_rotation_matrix().into_inner()
}

/// System angular momentum about the mass center, in platform-frame components.
pub fn angular_momentum_body(tau: f64, omega: &Vec3, cfg: &SystemConfig) -> Vec3 {
    let (i1, _) = spin_inertia_at(tau, &cfg.spin);
    cfg.platform.matrix() * omega + i1 * (omega + spin_axis())
}

/// System angular momentum in the inertial frame; constant along exact trajectories.
pub fn angular_momentum_inertial(tau: f64, omega: &Vec3, quat: &Quat, cfg: &SystemConfig) -> Vec3 {
    quat_to_matrix(quat) * angular_momentum_body(tau, omega, cfg)
}
