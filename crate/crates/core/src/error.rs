use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("total inertia is numerically singular at tau={tau} (condition estimate {condition:.3e})")]
    SingularInertia { tau: f64, condition: f64 },

    #[error("state blew up at tau={tau}: component {index} reached {value:e}")]
    BlowUp { tau: f64, index: usize, value: f64 },

    #[error("adaptive integrator hit its step limit at tau={tau}")]
    StepLimit { tau: f64 },

    #[error("closed form not defined for the {regime} regime: {reason}")]
    RegimeNotSupported { regime: &'static str, reason: &'static str },

    #[error("growth rate is degenerate (lambda^2 = {lambda_sq:e}); closed-form amplitudes are undefined")]
    DegenerateRate { lambda_sq: f64 },

    #[error("resonant configuration (|lambda - 1| = {distance:e}); Euler-angle closed forms are singular")]
    Resonance { distance: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {estimate:e})")]
    QuadratureDiverged { a: f64, b: f64, estimate: f64 },

    #[error("trajectories are not on a common grid: {0}")]
    GridMismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("empty stable subset: no grid point has sigma < 0")]
    EmptyStableSubset,

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownEntry { kind: &'static str, name: String, available: String },

    #[error("duplicate {kind} `{name}` in registry")]
    DuplicateEntry { kind: &'static str, name: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
