//! Closed-form first-order solutions.
//!
//! The x–z subsystem has the Floquet factorization `Φ(τ,0) = P(τ)·exp(τR)`
//! with `P(τ)` a rotation by `−τ` and `R = [[0, u1], [u2, 0]]`. In the frame
//! rotating with `P` the forcing `(sin τ, cos τ)` becomes the constant `(0, 1)`,
//! so the forced response starting from rest is
//!
//! ```text
//! q(τ) = ∫₀^τ exp(sR)·(0, 1) ds,     (ω̂x⁽¹⁾, ω̂z⁽¹⁾) = P(τ)·q(τ)
//! ```
//!
//! and the y channel integrates to `c1·q1²/u1 + c2·∫q2`. Each stability regime
//! gives `exp(sR)` a different elementary form (trigonometric, polynomial,
//! hyperbolic), which is what the functions below evaluate.

use serde::{Deserialize, Serialize};

use crate::model::{derive_params, DerivedParams, StabilityClass, SystemConfig};
use crate::{quad, Error, Mat2, Result, Vec2, Vec3};

/// Absolute tolerance of the variation-of-parameters quadrature.
pub const SEMI_ANALYTIC_TOL: f64 = 1e-10;

/// Periodic factor `P(τ)` of the Floquet decomposition.
pub fn periodic_factor(tau: f64) -> Mat2 {
    let (s, c) = tau.sin_cos();
    Mat2::new(c, s, -s, c)
}

/// Floquet factors of the x–z subsystem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetFactors {
    /// Constant exponent matrix `R`.
    pub exponent: Mat2,
}

impl FloquetFactors {
    /// `P(τ)`, 2π-periodic.
    pub fn periodic(&self, tau: f64) -> Mat2 {
        periodic_factor(tau)
    }

    /// Eigenvalues of `R` as (re, im) pairs: `±√(u1·u2)`.
    pub fn exponent_eigenvalues(&self) -> [(f64, f64); 2] {
        let prod = self.exponent[(0, 1)] * self.exponent[(1, 0)];
        if prod >= 0.0 {
            let r = prod.sqrt();
            [(r, 0.0), (-r, 0.0)]
        } else {
            let i = (-prod).sqrt();
            [(0.0, i), (0.0, -i)]
        }
    }
}

pub fn floquet_factors(p: &DerivedParams) -> FloquetFactors {
    FloquetFactors { exponent: Mat2::new(0.0, p.u1, p.u2, 0.0) }
}

/// `exp(τR)` in the regime recorded in `p`.
fn exponent_flow(tau: f64, p: &DerivedParams) -> Mat2 {
    let (u1, u2, l) = (p.u1, p.u2, p.lambda);
    match p.stability {
        StabilityClass::Stable => {
            let (s, c) = (l * tau).sin_cos();
            Mat2::new(c, u1 * s / l, u2 * s / l, c)
        }
        StabilityClass::MarginallyUnstable => Mat2::new(1.0, u1 * tau, u2 * tau, 1.0),
        StabilityClass::ExponentiallyUnstable => {
            let (s, c) = ((l * tau).sinh(), (l * tau).cosh());
            Mat2::new(c, u1 * s / l, u2 * s / l, c)
        }
    }
}

/// State transition matrix `Φ(τ, 0)` of the homogeneous x–z subsystem.
pub fn stm(tau: f64, p: &DerivedParams) -> Mat2 {
    periodic_factor(tau) * exponent_flow(tau, p)
}

/// Forced response in the rotating frame: `q(τ)` and the y-channel value.
fn rotating_response(tau: f64, p: &DerivedParams) -> Result<(Vec2, f64)> {
    let (u1, c1, c2, l) = (p.u1, p.c1, p.c2, p.lambda);
    if p.stability != StabilityClass::MarginallyUnstable && p.lambda_degenerate {
        return Err(Error::DegenerateRate { lambda_sq: l * l });
    }
    let out = match p.stability {
        StabilityClass::Stable => {
            let l2 = l * l;
            // 1 − cos(λτ), written to avoid cancellation near τ = 0.
            let one_minus_cos = 2.0 * (0.5 * l * tau).sin().powi(2);
            let q = Vec2::new(u1 * one_minus_cos / l2, (l * tau).sin() / l);
            let y = c1 * u1 * one_minus_cos * one_minus_cos / (l2 * l2) + c2 * one_minus_cos / l2;
            (q, y)
        }
        StabilityClass::MarginallyUnstable => {
            let t2 = tau * tau;
            let q = Vec2::new(0.5 * u1 * t2, tau);
            (q, 0.25 * c1 * u1 * t2 * t2 + 0.5 * c2 * t2)
        }
        StabilityClass::ExponentiallyUnstable => {
            let l2 = l * l;
            let cosh_minus_one = 2.0 * (0.5 * l * tau).sinh().powi(2);
            let q = Vec2::new(u1 * cosh_minus_one / l2, (l * tau).sinh() / l);
            let y = c1 * u1 * cosh_minus_one * cosh_minus_one / (l2 * l2) + c2 * cosh_minus_one / l2;
            (q, y)
        }
    };
    Ok(out)
}

/// First-order angular velocity `(ω̂x⁽¹⁾, ω̂y⁽¹⁾, ω̂z⁽¹⁾)` starting from rest.
pub fn omega_first_order(tau: f64, p: &DerivedParams) -> Result<Vec3> {
    let (q, y) = rotating_response(tau, p)?;
    let xz = periodic_factor(tau) * q;
    Ok(Vec3::new(xz.x, y, xz.y))
}

/// Forced x–z response by direct quadrature of `Φ(τ,0)·∫₀^τ Φ(s,0)⁻¹·(sin s, cos s) ds`.
pub fn omega_semi_analytic(tau: f64, p: &DerivedParams) -> Result<Vec2> {
    if tau == 0.0 {
        return Ok(Vec2::zeros());
    }
    let integrand = |s: f64| {
        let inv = stm(s, p).try_inverse().unwrap_or_else(|| Mat2::from_element(f64::NAN));
        let v = inv * Vec2::new(s.sin(), s.cos());
        [v.x, v.y]
    };
    let pieces = tau.abs().ceil().max(1.0) as usize;
    let [a, b] = quad::integrate(integrand, 0.0, tau, SEMI_ANALYTIC_TOL, pieces)?;
    Ok(stm(tau, p) * Vec2::new(a, b))
}

/// Physical angular velocity `(γ·ω̂x⁽¹⁾, γ²·ω̂y⁽¹⁾, γ·ω̂z⁽¹⁾)` of a configuration.
pub fn omega_analytic(tau: f64, cfg: &SystemConfig) -> Result<Vec3> {
    omega_analytic_with(tau, &derive_params(cfg)?)
}

/// [`omega_analytic`] from already derived parameters.
pub fn omega_analytic_with(tau: f64, p: &DerivedParams) -> Result<Vec3> {
    let w = omega_first_order(tau, p)?;
    let g = p.gamma;
    Ok(Vec3::new(g * w.x, g * g * w.y, g * w.z))
}

fn check_resonance(p: &DerivedParams) -> Result<()> {
    if p.resonant {
        return Err(Error::Resonance { distance: (p.lambda - 1.0).abs() });
    }
    Ok(())
}

/// `(θx, θz)` closed forms, σ ≤ 0 only.
pub fn precession_angles(tau: f64, p: &DerivedParams) -> Result<Vec2> {
    match p.stability {
        StabilityClass::Stable => {
            if p.lambda_degenerate {
                return Err(Error::DegenerateRate { lambda_sq: p.lambda * p.lambda });
            }
            check_resonance(p)?;
            let n = normalized_angles(tau, p.u1, p.lambda);
            let eps = p.gamma / (p.lambda * p.lambda);
            Ok(n * eps)
        }
        StabilityClass::MarginallyUnstable => {
            let (s, c) = tau.sin_cos();
            let t2 = tau * tau;
            let half_u1 = 0.5 * p.u1;
            // ∫ s·sin s, ∫ s·cos s and the quadratic terms present when u2 = 0.
            let x = (s - tau * c) + half_u1 * (t2 * s + 2.0 * tau * c - 2.0 * s);
            let z = (tau * s + c - 1.0) - half_u1 * (-t2 * c + 2.0 * tau * s + 2.0 * c - 2.0);
            Ok(Vec2::new(x, z) * p.gamma)
        }
        StabilityClass::ExponentiallyUnstable => Err(Error::RegimeNotSupported {
            regime: "sigma>0",
            reason: "Euler-angle closed forms exist only for sigma <= 0",
        }),
    }
}

/// `(θx, θz)/ε` for σ < 0.
fn normalized_angles(tau: f64, u1: f64, l: f64) -> Vec2 {
    let l2 = l * l;
    let k = 1.0 / (l2 - 1.0);
    let (s, c) = tau.sin_cos();
    let (sl, cl) = (l * tau).sin_cos();
    let a = u1 - l2;
    let b = l * (u1 - 1.0);
    let d = u1 * (l2 - 1.0);
    Vec2::new(
        k * (a * s * cl - b * c * sl + d * s),
        k * (a * c * cl + b * s * sl + d * c - (u1 - 1.0) * l2),
    )
}

/// Small-angle Euler triple: closed-form `θx`, `θz` and `θy` by quadrature
/// of `θ̇y = ω̂y + θy·ω̂z` along the closed-form solution.
pub fn euler_angles_analytic(tau: f64, p: &DerivedParams) -> Result<Vec3> {
    let xz = precession_angles(tau, p)?;
    if tau == 0.0 {
        return Ok(Vec3::zeros());
    }
    // θ̇z = γ·z, so the integrating factor of the θy equation is exp(θz).
    let mut failure = None;
    let integrand = |s: f64| match (rotating_response(s, p), precession_angles(s, p)) {
        (Ok((_, y)), Ok(angles)) => [y * (-angles.y).exp()],
        (Err(e), _) | (_, Err(e)) => {
            failure.get_or_insert(e);
            [0.0]
        }
    };
    let pieces = tau.abs().ceil().max(1.0) as usize;
    let [integral] = quad::integrate(integrand, 0.0, tau, 1e-11 * (1.0 + tau.abs()), pieces)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let theta_y = p.gamma * p.gamma * xz.y.exp() * integral;
    Ok(Vec3::new(xz.x, theta_y, xz.y))
}

/// Precession center, radius and nutation measures of a stable configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NutationProfile {
    /// The path circles `(0, −θz0)` in the (θx, θz) plane.
    pub theta_z0: f64,
    /// Mean squared precession radius (rad²).
    pub a0: f64,
    /// Largest |A(τ)| (rad²).
    pub a_max: f64,
    /// Relative nutation amplitude `√|A_max/A0|`.
    pub eps_n: f64,
    pub precession_freqs: [f64; 3],
    pub nutation_freqs: [f64; 2],
    pub lambda: f64,
    pub epsilon: f64,
    /// Coefficient of `cos(2λτ)` in A(τ).
    pub cos2_coeff: f64,
    /// Coefficient of `cos(λτ)` in A(τ).
    pub cos1_coeff: f64,
}

/// Coefficients `(A0, cos 2λτ, cos λτ)` of `r(τ)²` in units of `ε²`.
pub fn radius_coefficients(u1: f64, lambda: f64) -> (f64, f64, f64) {
    let l2 = lambda * lambda;
    let scale = 1.0 / ((l2 - 1.0) * (l2 - 1.0));
    let a = u1 - l2;
    let b2 = l2 * (u1 - 1.0) * (u1 - 1.0);
    let d = u1 * (l2 - 1.0);
    (
        scale * (0.5 * (a * a + b2) + d * d),
        scale * 0.5 * (a * a - b2),
        scale * 2.0 * d * a,
    )
}

/// Max of `|B·cos 2φ + C·cos φ|` over all phases φ.
fn two_tone_peak(b: f64, c: f64) -> f64 {
    // With x = cos φ the expression is the quadratic B(2x² − 1) + Cx on [−1, 1].
    let g = |x: f64| b * (2.0 * x * x - 1.0) + c * x;
    let mut best = g(1.0).abs().max(g(-1.0).abs());
    if b != 0.0 {
        let vertex = -c / (4.0 * b);
        if vertex.abs() < 1.0 {
            best = best.max(g(vertex).abs());
        }
    }
    best
}

impl NutationProfile {
    /// Profile from the Floquet entries and γ alone.
    pub fn from_rates(u1: f64, u2: f64, gamma: f64) -> Result<Self> {
        let l2 = -u1 * u2;
        Self::build(u1, u2, gamma, (u1 - 1.0) / (l2 - 1.0))
    }

    /// Profile from augmented inertias; `θz0` reduces to `γ·Izz′/Iyy`.
    pub fn from_inertias(ixx_aug: f64, iyy: f64, izz_aug: f64, gamma: f64) -> Result<Self> {
        let u1 = (iyy - izz_aug) / ixx_aug;
        let u2 = (ixx_aug - iyy) / izz_aug;
        Self::build(u1, u2, gamma, izz_aug / iyy)
    }

    fn build(u1: f64, u2: f64, gamma: f64, center_ratio: f64) -> Result<Self> {
        let l2 = -u1 * u2;
        if !(l2 > 0.0) {
            return Err(Error::RegimeNotSupported {
                regime: if l2 == 0.0 { "sigma=0" } else { "sigma>0" },
                reason: "precession radius is periodic only for sigma < 0",
            });
        }
        if l2 < crate::model::LAMBDA_SQ_DEGENERATE {
            return Err(Error::DegenerateRate { lambda_sq: l2 });
        }
        let lambda = l2.sqrt();
        if (lambda - 1.0).abs() < crate::model::RESONANCE_TOL {
            return Err(Error::Resonance { distance: (lambda - 1.0).abs() });
        }
        let epsilon = gamma / l2;
        let e2 = epsilon * epsilon;
        let (a0n, cos2n, cos1n) = radius_coefficients(u1, lambda);
        let peak = two_tone_peak(cos2n, cos1n);
        Ok(NutationProfile {
            theta_z0: gamma * center_ratio,
            a0: a0n * e2,
            a_max: peak * e2,
            eps_n: (peak / a0n).abs().sqrt(),
            precession_freqs: [1.0 + lambda, 1.0 - lambda, 1.0],
            nutation_freqs: [lambda, 2.0 * lambda],
            lambda,
            epsilon,
            cos2_coeff: cos2n * e2,
            cos1_coeff: cos1n * e2,
        })
    }

    /// Nutation term `A(τ)`.
    pub fn nutation_term(&self, tau: f64) -> f64 {
        self.cos2_coeff * (2.0 * self.lambda * tau).cos() + self.cos1_coeff * (self.lambda * tau).cos()
    }

    /// Precession radius `r(τ) = √(A0 + A(τ))`.
    pub fn radius(&self, tau: f64) -> f64 {
        (self.a0 + self.nutation_term(tau)).max(0.0).sqrt()
    }

    /// Radius band `[√(A0 − A_max), √(A0 + A_max)]`, lower end clamped at 0.
    pub fn radius_band(&self) -> (f64, f64) {
        ((self.a0 - self.a_max).max(0.0).sqrt(), (self.a0 + self.a_max).sqrt())
    }

    /// Period of `A(τ)`, `2π/λ`.
    pub fn nutation_period(&self) -> f64 {
        std::f64::consts::TAU / self.lambda
    }
}

/// Nutation profile of a stable configuration.
pub fn nutation_profile(p: &DerivedParams) -> Result<NutationProfile> {
    if p.stability != StabilityClass::Stable {
        return Err(Error::RegimeNotSupported {
            regime: p.stability.regime(),
            reason: "precession radius is periodic only for sigma < 0",
        });
    }
    NutationProfile::from_inertias(p.ixx_aug, p.iyy, p.izz_aug, p.gamma)
}

/// Unevaluated sum `hi + lo` carrying roughly twice the precision of `f64`.
#[derive(Clone, Copy)]
struct Wide(f64, f64);

impl Wide {
    fn product(a: f64, b: f64) -> Wide {
        let p = a * b;
        Wide(p, a.mul_add(b, -p))
    }

    fn scale(self, k: f64) -> Wide {
        let Wide(hi, lo) = Wide::product(self.0, k);
        Wide::sum(hi, lo + self.1 * k)
    }

    fn sum(a: f64, b: f64) -> Wide {
        let s = a + b;
        let v = s - a;
        Wide(s, (a - (s - v)) + (b - v))
    }

    fn add(self, o: Wide) -> Wide {
        let Wide(hi, lo) = Wide::sum(self.0, o.0);
        Wide::sum(hi, lo + self.1 + o.1)
    }

    fn square(self) -> Wide {
        let Wide(hi, lo) = Wide::product(self.0, self.0);
        Wide::sum(hi, lo + 2.0 * self.0 * self.1)
    }
}

/// `[θx² + (θz + θz0)² − r(τ)²] / ε²` of the closed-form angles.
///
/// The common factor `1/(λ² − 1)` is pulled out and the remaining brackets
/// are evaluated in extended precision, so the result is limited only by the
/// rounding of the sines and cosines themselves.
pub fn circle_residual(tau: f64, p: &DerivedParams) -> Result<f64> {
    let profile = nutation_profile(p)?;
    let l = profile.lambda;
    let l2 = l * l;
    let u1 = p.u1;
    let (a, b, d) = (u1 - l2, l * (u1 - 1.0), u1 * (l2 - 1.0));
    let (s, c) = tau.sin_cos();
    let (sl, cl) = (l * tau).sin_cos();
    // θx/(εk) and (θz + θz0)/(εk), with k = 1/(λ² − 1); the constant
    // −(u1 − 1)λ² of θz cancels against the center exactly.
    let x = Wide::product(s, cl).scale(a).add(Wide::product(c, sl).scale(-b)).add(Wide::product(d, s));
    let z = Wide::product(c, cl).scale(a).add(Wide::product(s, sl).scale(b)).add(Wide::product(d, c));
    let r2 = Wide::product(0.5 * (a * a + b * b) + d * d, 1.0)
        .add(Wide::product(0.5 * (a * a - b * b), (2.0 * l * tau).cos()))
        .add(Wide::product(2.0 * a * d, cl));
    let diff = x.square().add(z.square()).add(Wide(-r2.0, -r2.1));
    let k = 1.0 / (l2 - 1.0);
    Ok((diff.0 + diff.1) * k * k)
}
