use thiserror::Error;

/// Every failure the library can report. Scalars are carried as `f64` so the error
/// type stays independent of the working precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MhdError {
    #[error("pressure must be positive, got {p}")]
    NonPositivePressure { p: f64 },

    #[error("hyperbolicity violated: rho = {rho}, rho_p = {rho_p}")]
    HyperbolicityViolated { rho: f64, rho_p: f64 },

    #[error("d1Phi1 = {d1phi1} is below 1/2")]
    DegenerateJacobian { d1phi1: f64 },

    #[error("invalid equation-of-state parameter {name} = {value}")]
    InvalidEos { name: &'static str, value: f64 },

    #[error("cutoff support bound must exceed 1, got {m}")]
    InvalidSupport { m: f64 },

    #[error("not a diffeomorphism: min d1Phi1 = {min_d1phi1}")]
    NotADiffeomorphism { min_d1phi1: f64 },

    #[error("constraint {condition} violated (residual {residual:e})")]
    ConstraintViolated { condition: String, residual: f64 },

    #[error("stability margin {margin} below {delta} at {location}")]
    StabilityViolated {
        margin: f64,
        delta: f64,
        location: String,
    },

    #[error("front-gradient system is singular (det = {det:e})")]
    SingularFrontSystem { det: f64 },

    #[error("time step {dt} exceeds the CFL limit {limit}")]
    CflViolated { dt: f64, limit: f64 },

    #[error("non-finite value detected at step {step}")]
    NanDetected { step: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("config key {key}: {reason}")]
    Config { key: String, reason: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for MhdError {
    fn from(e: std::io::Error) -> Self {
        MhdError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MhdError>;
