use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {x} lies outside [{a}, {b}]")]
    Domain { x: f64, a: f64, b: f64 },

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("integrand is not integrable: {0}")]
    NonIntegrable(String),

    #[error("subdivision budget of {panels} panels exhausted (value {value:e}, error {error:e})")]
    BudgetExceeded { panels: usize, value: f64, error: f64 },

    #[error("integrand evaluated to a non-finite value at x = {0}")]
    NonFinite(f64),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("no eigenvalue in bracket [{lo:e}, {hi:e}]")]
    NoEigenvalueInBracket { lo: f64, hi: f64 },

    #[error("coefficient vanishes in the interior at x = {0}")]
    SingularCoefficient(f64),

    #[error("weight is not differentiable: {0}")]
    NonDifferentiableWeight(String),

    #[error("eigenvalue routes disagree: finite differences {fd}, shooting {shooting}")]
    EigenMismatch { fd: f64, shooting: f64 },

    #[error("no crossing: {0}")]
    NoCrossing(String),

    #[error("unknown identifier `{0}`")]
    UnknownId(String),
}

pub type Result<T> = std::result::Result<T, Error>;
