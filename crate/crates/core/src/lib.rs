//! Attitude dynamics of a spacecraft with an asymmetric platform and an
//! unbalanced rotor spinning at a constant relative rate.
//!
//! The crate covers the full nonlinear torque-free model, its first-order
//! linear periodically time-varying (LPTV) reduction, closed-form solutions
//! in the three stability regimes, precession/nutation geometry and the
//! metrics used to compare trajectories.
//!
//! Trajectory generators and integrators are exposed as trait objects held
//! in name-keyed registries (see [`registry`]) so front ends can select them
//! at runtime.

pub mod analysis;
pub mod analytic;
pub mod dynamics;
mod error;
pub mod integrate;
pub mod model;
pub mod presets;
pub mod propagate;
pub mod quad;
pub mod registry;

pub use error::{Error, Result};

/// Three-vector used for angular velocities, Euler triples and momenta.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3×3 matrix used for inertia tensors and rotations.
pub type Mat3 = nalgebra::Matrix3<f64>;
/// Two-vector of the decoupled x–z subsystem.
pub type Vec2 = nalgebra::Vector2<f64>;
/// 2×2 matrix of the decoupled x–z subsystem.
pub type Mat2 = nalgebra::Matrix2<f64>;
/// Attitude quaternion (w, x, y, z), platform frame to inertial frame.
pub type Quat = nalgebra::Quaternion<f64>;
