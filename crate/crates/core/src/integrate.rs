//! Explicit Runge–Kutta integration on a uniform output grid.
//!
//! A [`Stepper`] advances a state across one output interval; [`Rk4`] takes a
//! single classical step, [`DormandPrince`] sub-steps adaptively inside the
//! interval. [`integrate_ode`] drives either over `[0, tau_end]`.

use crate::registry::{Named, Registry};
use crate::{Error, Result};

/// Any state component whose magnitude exceeds this aborts the integration.
pub const BLOW_UP_LIMIT: f64 = 1e12;

/// Default output spacing in τ units.
pub const DEFAULT_DT: f64 = 1e-3;

/// First-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()>;
}

/// Adapts a closure `(t, y, dydt) -> Result<()>` into an [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnSystem { dim, f }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        (self.f)(t, y, dydt)
    }
}

/// Advances a state from `t` to `t + h`.
pub trait Stepper: Named + Send + Sync {
    fn advance(&self, sys: &dyn OdeSystem, t: f64, y: &mut [f64], h: f64) -> Result<()>;
}

/// Classical fourth-order Runge–Kutta, one step per call.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rk4;

impl Named for Rk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }
    fn describe(&self) -> &'static str {
        "classical fixed-step 4th-order Runge-Kutta"
    }
}

impl Stepper for Rk4 {
    fn advance(&self, sys: &dyn OdeSystem, t: f64, y: &mut [f64], h: f64) -> Result<()> {
        let n = y.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];

        sys.eval(t, y, &mut k1)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        sys.eval(t + 0.5 * h, &tmp, &mut k2)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        sys.eval(t + 0.5 * h, &tmp, &mut k3)?;
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        sys.eval(t + h, &tmp, &mut k4)?;
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(())
    }
}

/// Dormand–Prince 5(4) with step-size control, sub-stepping inside each call.
#[derive(Debug, Clone, Copy)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for DormandPrince {
    fn default() -> Self {
        DormandPrince { rtol: 1e-11, atol: 1e-14 }
    }
}

impl Named for DormandPrince {
    fn name(&self) -> &'static str {
        "dopri5"
    }
    fn describe(&self) -> &'static str {
        "adaptive Dormand-Prince 5(4), sub-stepping within each output interval"
    }
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const DP_MAX_STEPS: usize = 100_000;

impl Stepper for DormandPrince {
    fn advance(&self, sys: &dyn OdeSystem, t0: f64, y: &mut [f64], span: f64) -> Result<()> {
        let n = y.len();
        let t_end = t0 + span;
        let mut t = t0;
        let mut h = span;
        let mut k = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut high = vec![0.0; n];

        for _ in 0..DP_MAX_STEPS {
            let remaining = t_end - t;
            if remaining <= 1e-14 * span.abs().max(t_end.abs()) {
                return Ok(());
            }
            h = h.min(remaining);

            sys.eval(t, y, &mut k[0])?;
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += h * DP_A[s][j] * kj[i];
                    }
                    tmp[i] = acc;
                }
                sys.eval(t + DP_C[s] * h, &tmp, &mut k[s])?;
            }
            let mut err = 0.0f64;
            for i in 0..n {
                let mut hi = y[i];
                let mut lo = y[i];
                for s in 0..7 {
                    hi += h * DP_B[s] * k[s][i];
                    lo += h * DP_B_LOW[s] * k[s][i];
                }
                high[i] = hi;
                let scale = self.atol + self.rtol * y[i].abs().max(hi.abs());
                err = err.max(((hi - lo) / scale).abs());
            }
            if err <= 1.0 {
                t += h;
                y.copy_from_slice(&high);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        }
        Err(Error::StepLimit { tau: t })
    }
}

/// Registry of the built-in steppers.
pub fn stepper_registry() -> Registry<dyn Stepper> {
    let mut reg: Registry<dyn Stepper> = Registry::new("integrator");
    reg.register(Box::new(Rk4)).expect("unique");
    reg.register(Box::new(DormandPrince::default())).expect("unique");
    reg
}

/// Uniformly sampled solution of an ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Number of uniform intervals of width `dt` inside `[0, tau_end]`, with a
/// relative slack so that e.g. 100/1e-3 counts as exactly 100 000.
pub fn uniform_steps(tau_end: f64, dt: f64) -> usize {
    let ratio = tau_end / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded as usize
    } else {
        ratio.floor() as usize
    }
}

/// Integration options beyond the grid itself.
pub struct Drive<'a> {
    pub stepper: &'a dyn Stepper,
    /// Applied to the state after every output step (e.g. quaternion renormalization).
    pub post_step: Option<&'a dyn Fn(&mut [f64])>,
    /// Append a final partial step ending exactly at `tau_end`.
    pub include_end: bool,
}

impl Default for Drive<'_> {
    fn default() -> Self {
        Drive { stepper: &Rk4, post_step: None, include_end: true }
    }
}

fn check_dt(tau_end: f64, dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(tau_end.is_finite() && tau_end > 0.0) {
        return Err(Error::invalid("tau_end", format!("must be positive, got {tau_end}")));
    }
    Ok(())
}

fn check_blow_up(t: f64, y: &[f64]) -> Result<()> {
    for (index, &value) in y.iter().enumerate() {
        if !value.is_finite() || value.abs() > BLOW_UP_LIMIT {
            return Err(Error::BlowUp { tau: t, index, value });
        }
    }
    Ok(())
}

/// Classical RK4 from `t = 0`, sampled at every `k·dt`, ending exactly at `tau_end`.
pub fn integrate_ode(sys: &dyn OdeSystem, y0: &[f64], tau_end: f64, dt: f64) -> Result<Solution> {
    integrate_with(sys, y0, tau_end, dt, &Drive::default())
}

/// [`integrate_ode`] with an explicit stepper and post-step hook.
pub fn integrate_with(sys: &dyn OdeSystem, y0: &[f64], tau_end: f64, dt: f64, drive: &Drive) -> Result<Solution> {
    check_dt(tau_end, dt)?;
    if y0.len() != sys.dim() {
        return Err(Error::invalid("y0", format!("length {} != system dimension {}", y0.len(), sys.dim())));
    }
    let steps = uniform_steps(tau_end, dt);
    let mut times = Vec::with_capacity(steps + 2);
    let mut states = Vec::with_capacity(steps + 2);
    let mut y = y0.to_vec();
    check_blow_up(0.0, &y)?;
    times.push(0.0);
    states.push(y.clone());

    for k in 0..steps {
        let t = k as f64 * dt;
        drive.stepper.advance(sys, t, &mut y, dt)?;
        if let Some(hook) = drive.post_step {
            hook(&mut y);
        }
        let t_next = (k + 1) as f64 * dt;
        check_blow_up(t_next, &y)?;
        times.push(t_next);
        states.push(y.clone());
    }

    let t_last = steps as f64 * dt;
    let rest = tau_end - t_last;
    if drive.include_end && rest > 1e-9 * dt {
        drive.stepper.advance(sys, t_last, &mut y, rest)?;
        if let Some(hook) = drive.post_step {
            hook(&mut y);
        }
        check_blow_up(tau_end, &y)?;
        times.push(tau_end);
        states.push(y);
    }
    Ok(Solution { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_system() -> FnSystem<impl Fn(f64, &[f64], &mut [f64]) -> Result<()>> {
        FnSystem::new(1, |_, y: &[f64], d: &mut [f64]| {
            d[0] = y[0];
            Ok(())
        })
    }

    fn oscillator() -> FnSystem<impl Fn(f64, &[f64], &mut [f64]) -> Result<()>> {
        FnSystem::new(2, |_, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
            Ok(())
        })
    }

    #[test]
    fn zero_rhs_keeps_state() {
        let sys = FnSystem::new(3, |_, _: &[f64], d: &mut [f64]| {
            d.fill(0.0);
            Ok(())
        });
        let sol = integrate_ode(&sys, &[1.0, -2.0, 3.5], 2.0, 0.1).unwrap();
        assert_eq!(sol.times.len(), 21);
        assert!(sol.states.iter().all(|s| s == &[1.0, -2.0, 3.5]));
    }

    #[test]
    fn exponential_growth() {
        let sol = integrate_ode(&exp_system(), &[1.0], 1.0, 1e-3).unwrap();
        assert_eq!(sol.times.len(), 1001);
        assert!((sol.states.last().unwrap()[0] - std::f64::consts::E).abs() < 1e-6);
    }

    #[test]
    fn oscillator_energy_drift() {
        let sol = integrate_ode(&oscillator(), &[1.0, 0.0], 10.0, 1e-3).unwrap();
        assert_eq!(sol.states.len(), 10_001);
        let e0 = 0.5;
        let drift = sol
            .states
            .iter()
            .map(|s| (0.5 * (s[0] * s[0] + s[1] * s[1]) - e0).abs() / e0)
            .fold(0.0, f64::max);
        assert!(drift < 1e-8, "drift {drift}");
        let last = sol.states.last().unwrap();
        assert!((last[0] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn final_partial_step_lands_on_end() {
        let sol = integrate_ode(&exp_system(), &[1.0], 1.05, 0.1).unwrap();
        assert_eq!(sol.times.len(), 12);
        assert_eq!(*sol.times.last().unwrap(), 1.05);
        assert!((sol.states.last().unwrap()[0] - 1.05f64.exp()).abs() < 1e-5);
    }

    #[test]
    fn blow_up_is_reported() {
        let sys = FnSystem::new(1, |_, y: &[f64], d: &mut [f64]| {
            d[0] = y[0] * y[0];
            Ok(())
        });
        match integrate_ode(&sys, &[1.0], 2.0, 1e-3) {
            Err(Error::BlowUp { tau, index: 0, .. }) => assert!(tau > 0.9 && tau < 1.01, "tau={tau}"),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(integrate_ode(&exp_system(), &[1.0], 1.0, 0.0).is_err());
        assert!(integrate_ode(&exp_system(), &[1.0], -1.0, 0.1).is_err());
        assert!(integrate_ode(&exp_system(), &[1.0, 2.0], 1.0, 0.1).is_err());
    }

    #[test]
    fn dormand_prince_matches_closed_forms() {
        let drive = Drive { stepper: &DormandPrince::default(), ..Drive::default() };
        let sol = integrate_with(&oscillator(), &[1.0, 0.0], 20.0, 0.5, &drive).unwrap();
        for (t, s) in sol.times.iter().zip(&sol.states) {
            assert!((s[0] - t.cos()).abs() < 1e-9, "t={t}");
        }
        let sol = integrate_with(&exp_system(), &[1.0], 1.0, 0.25, &drive).unwrap();
        assert!((sol.states.last().unwrap()[0] - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn uniform_step_count_is_robust_to_rounding() {
        assert_eq!(uniform_steps(100.0, 1e-3), 100_000);
        assert_eq!(uniform_steps(0.3, 0.1), 3);
        assert_eq!(uniform_steps(1.05, 0.1), 10);
    }

    #[test]
    fn registry_lists_steppers() {
        let reg = stepper_registry();
        assert_eq!(reg.names(), vec!["dopri5", "rk4"]);
        assert!(reg.get("rk4").is_ok());
        assert!(reg.get("euler").is_err());
    }
}
