//! Inertia parameters, reduced-system coefficients and the stability class.
//!
//! The equivalent spin inertia `I₁` is described by its four constant-basis
//! elements in the rotor-attached frame; the platform is described by its
//! transverse and spin-axis moments. Everything downstream is derived from
//! these six numbers plus the product of inertia `Ixy`, which sets the
//! perturbation scale `γ`.

use serde::{Deserialize, Serialize};

use crate::{Error, Mat3, Result, Vec3};

/// Constant-basis elements of the equivalent spin inertia tensor (kg·m²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinInertia {
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ixy: f64,
}

impl SpinInertia {
    pub fn new(ixx: f64, iyy: f64, izz: f64, ixy: f64) -> Result<Self> {
        let s = SpinInertia { ixx, iyy, izz, ixy };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        positive("ixx", self.ixx)?;
        positive("iyy", self.iyy)?;
        positive("izz", self.izz)?;
        if !self.ixy.is_finite() {
            return Err(Error::invalid("ixy", "must be finite"));
        }
        if self.ixy * self.ixy >= self.ixx * self.iyy {
            return Err(Error::invalid(
                "ixy",
                format!(
                    "ixy^2 = {} must be below ixx*iyy = {} (positive definiteness)",
                    self.ixy * self.ixy,
                    self.ixx * self.iyy
                ),
            ));
        }
        Ok(())
    }

    /// The constant matrix `C` with `I₁(τ) = T(τ)·C·T(τ)ᵀ`.
    pub fn matrix(&self) -> Mat3 {
        Mat3::new(
            self.ixx, self.ixy, 0.0, //
            self.ixy, self.iyy, 0.0, //
            0.0, 0.0, self.izz,
        )
    }
}

/// Platform inertia about its mass center (kg·m²): transverse `ibr`, spin-axis `iby`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlatformInertia {
    pub ibr: f64,
    pub iby: f64,
}

impl PlatformInertia {
    pub fn new(ibr: f64, iby: f64) -> Result<Self> {
        let p = PlatformInertia { ibr, iby };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("ibr", self.ibr)?;
        positive("iby", self.iby)
    }

    pub fn matrix(&self) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(self.ibr, self.iby, self.ibr))
    }
}

/// Physical description of the rotor/platform pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorPhysical {
    /// Rotor mass (kg).
    pub mass_rotor: f64,
    /// Platform mass (kg).
    pub mass_platform: f64,
    /// Offset of the rotor mass center from the spin axis (m).
    pub h: f64,
    /// Offset of the platform mass center from the spin plane (m).
    pub d: f64,
    /// Principal moments of the rotor about its own mass center (kg·m²).
    pub rotor_principal: [f64; 3],
}

impl RotorPhysical {
    pub fn validate(&self) -> Result<()> {
        positive("mass_rotor", self.mass_rotor)?;
        positive("mass_platform", self.mass_platform)?;
        non_negative("h", self.h)?;
        non_negative("d", self.d)?;
        const NAMES: [&str; 3] = ["rotor_principal[0]", "rotor_principal[1]", "rotor_principal[2]"];
        for (name, &value) in NAMES.iter().zip(&self.rotor_principal) {
            positive(name, value)?;
        }
        Ok(())
    }

    /// Reduced mass `mA·mB/(mA+mB)` of the two-body offset term.
    pub fn reduced_mass(&self) -> f64 {
        self.mass_rotor * self.mass_platform / (self.mass_rotor + self.mass_platform)
    }
}

/// Composes the equivalent spin inertia from the rotor's principal moments and
/// the mass-center offset term (parallel-axis composition of the two bodies).
pub fn compose_equivalent_inertia(phys: &RotorPhysical) -> Result<SpinInertia> {
    phys.validate()?;
    let mu = phys.reduced_mass();
    let (h, d) = (phys.h, phys.d);
    let [ia_xx, ia_yy, ia_zz] = phys.rotor_principal;
    SpinInertia::new(
        ia_xx + mu * h * h,
        ia_yy + mu * d * d,
        ia_zz + mu * (d * d + h * h),
        -mu * d * h,
    )
}

/// Full description of one spacecraft configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub spin: SpinInertia,
    pub platform: PlatformInertia,
    /// Rotor relative rate |Ω| (rad/s); only used to convert τ to seconds.
    pub omega_mag: f64,
    /// Initial dimensionless platform angular velocity.
    pub initial_omega: [f64; 3],
}

pub const DEFAULT_OMEGA_MAG: f64 = 1.0;

impl SystemConfig {
    /// Configuration with `|Ω| = 1` and the platform initially at rest.
    pub fn new(spin: SpinInertia, platform: PlatformInertia) -> Self {
        SystemConfig { spin, platform, omega_mag: DEFAULT_OMEGA_MAG, initial_omega: [0.0; 3] }
    }

    /// Shorthand taking the six inertia scalars in the usual order.
    pub fn from_inertias(ixx: f64, iyy: f64, izz: f64, ixy: f64, ibr: f64, iby: f64) -> Result<Self> {
        let cfg = Self::new(SpinInertia { ixx, iyy, izz, ixy }, PlatformInertia { ibr, iby });
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.spin.validate()?;
        self.platform.validate()?;
        positive("omega_mag", self.omega_mag)?;
        if self.initial_omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("initial_omega", "must be finite"));
        }
        Ok(())
    }

    pub fn initial_omega(&self) -> Vec3 {
        Vec3::from(self.initial_omega)
    }

    /// Same configuration with the product of inertia replaced.
    pub fn with_ixy(mut self, ixy: f64) -> Self {
        self.spin.ixy = ixy;
        self
    }
}

/// Qualitative behaviour of the first-order attitude motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityClass {
    /// σ < 0: bounded periodic motion.
    Stable,
    /// σ = 0: linear divergence.
    MarginallyUnstable,
    /// σ > 0: exponential divergence.
    ExponentiallyUnstable,
}

impl StabilityClass {
    pub fn label(self) -> &'static str {
        match self {
            StabilityClass::Stable => "Stable",
            StabilityClass::MarginallyUnstable => "MarginallyUnstable",
            StabilityClass::ExponentiallyUnstable => "ExponentiallyUnstable",
        }
    }

    /// Short regime tag used in diagnostics.
    pub fn regime(self) -> &'static str {
        match self {
            StabilityClass::Stable => "sigma<0",
            StabilityClass::MarginallyUnstable => "sigma=0",
            StabilityClass::ExponentiallyUnstable => "sigma>0",
        }
    }
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Relative tolerance on σ, scaled by `Ixx′·Izz′`.
pub const SIGMA_REL_TOL: f64 = 1e-12;
/// Below this λ² the σ≠0 closed-form amplitudes (∝ 1/λ²) are rejected.
pub const LAMBDA_SQ_DEGENERATE: f64 = 1e-9;
/// Within this distance of λ = 1 the Euler-angle closed forms are singular.
pub const RESONANCE_TOL: f64 = 1e-6;

/// Scalar coefficients of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub u1: f64,
    pub u2: f64,
    /// Stability discriminant (kg²·m⁴).
    pub sigma: f64,
    /// √|u1·u2|: oscillation rate when stable, growth rate when exponentially unstable.
    pub lambda: f64,
    /// γ/λ², `None` when λ = 0.
    pub epsilon: Option<f64>,
    pub ixx_aug: f64,
    pub iyy: f64,
    pub izz_aug: f64,
    pub stability: StabilityClass,
    /// λ² below [`LAMBDA_SQ_DEGENERATE`].
    pub lambda_degenerate: bool,
    /// |λ − 1| below [`RESONANCE_TOL`].
    pub resonant: bool,
}

impl DerivedParams {
    /// `u1·u2`, which is `−λ²` when stable and `+λ²` when exponentially unstable.
    pub fn rate_product(&self) -> f64 {
        self.u1 * self.u2
    }
}

/// Derives the reduced-system coefficients of a configuration.
pub fn derive_params(cfg: &SystemConfig) -> Result<DerivedParams> {
    cfg.validate()?;
    let SpinInertia { ixx, iyy, izz, ixy } = cfg.spin;
    let PlatformInertia { ibr, iby } = cfg.platform;

    let ixx_aug = ixx + ibr;
    let izz_aug = izz + ibr;

    let gamma = ixy / izz_aug;
    let alpha = (ixx - izz) * (ixx - iyy + 2.0 * ibr + izz) / (2.0 * izz_aug * ixx_aug);
    let beta = -(ixx - iyy - izz) / izz_aug;
    let c1 = -(ixx - izz) / (2.0 * (iby + iyy));
    let c2 = -izz_aug * (ixx + iyy - izz) / ((iby + iyy) * ixx_aug);

    let u1 = 2.0 * alpha + beta - 1.0;
    let u2 = 1.0 - beta;
    let sigma = -(iyy - ixx_aug) * (iyy - izz_aug);

    let stability = classify_sigma(sigma, ixx_aug, izz_aug);
    let lambda_sq = match stability {
        StabilityClass::MarginallyUnstable => 0.0,
        _ => (u1 * u2).abs(),
    };
    let lambda = lambda_sq.sqrt();
    let epsilon = (lambda > 0.0).then(|| gamma / lambda_sq);

    Ok(DerivedParams {
        gamma,
        alpha,
        beta,
        c1,
        c2,
        u1,
        u2,
        sigma,
        lambda,
        epsilon,
        ixx_aug,
        iyy,
        izz_aug,
        stability,
        lambda_degenerate: stability != StabilityClass::MarginallyUnstable
            && lambda_sq < LAMBDA_SQ_DEGENERATE,
        resonant: (lambda - 1.0).abs() < RESONANCE_TOL,
    })
}

/// Stability class from the sign of σ.
pub fn classify_stability(p: &DerivedParams) -> StabilityClass {
    classify_sigma(p.sigma, p.ixx_aug, p.izz_aug)
}

fn classify_sigma(sigma: f64, ixx_aug: f64, izz_aug: f64) -> StabilityClass {
    let tol = SIGMA_REL_TOL * ixx_aug * izz_aug;
    if sigma < -tol {
        StabilityClass::Stable
    } else if sigma > tol {
        StabilityClass::ExponentiallyUnstable
    } else {
        StabilityClass::MarginallyUnstable
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {value}")))
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be non-negative and finite, got {value}")))
    }
}
