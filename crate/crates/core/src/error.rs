use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("negative argument: {0}")]
    NegativeArgument(f64),
    #[error("series did not converge within {terms} terms (last estimate {estimate:e})")]
    NonConvergence { terms: usize, estimate: f64 },
    #[error("moment order must exceed -1, got {0}")]
    InvalidMomentOrder(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported q = {0}")]
    UnsupportedQ(u32),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("invalid transform pair request: {0}")]
    InvalidPair(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("grid must be uniform: {0}")]
    NonUniformGrid(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unsupported fractional order {0} (grid scheme requires 0 < mu < 1)")]
    UnsupportedOrder(f64),
    #[error("time must be positive, got {0}")]
    InvalidTime(f64),
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("order {0} too close to 1 for reliable double-precision evaluation")]
    NearSingularOrder(f64),
    #[error("explicit update norm growth detected at step {step} (max |u| = {norm:e})")]
    CflViolation { step: usize, norm: f64 },
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("at least {required} paths needed, got {got}")]
    InsufficientPaths { required: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
