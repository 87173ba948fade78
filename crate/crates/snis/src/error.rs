//! Crate-wide error type. Every fallible operation returns [`Error`]; the
//! variants name the violated precondition rather than wrapping strings.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation {op} is not supported for this model: {reason}")]
    UnsupportedModel { op: &'static str, reason: String },

    #[error("assumption violated in {op}: {reason}")]
    AssumptionViolated { op: &'static str, reason: String },

    #[error("M_theta is infinite or undefined at theta = {theta} (MGF radius {radius})")]
    InfiniteMTheta { theta: f64, radius: f64 },

    #[error("empty sample set")]
    EmptySample,

    #[error("non-finite tilt exponent at sample index {index}")]
    NonFiniteTilt { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature failed to converge (requested rel tol {rel_tol:.1e}, reached {reached:.1e})")]
    QuadratureFailure { rel_tol: f64, reached: f64 },

    #[error("covariance factorization failed: min eigenvalue {min_eigenvalue:.3e} below tolerance")]
    FactorizationFailure { min_eigenvalue: f64 },

    #[error("ingestion error at row {row}: {reason}")]
    Ingest { row: usize, reason: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("evaluation budget exceeded: {needed} grid evaluations, limit {limit}")]
    BudgetExceeded { needed: u64, limit: u64 },

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),

    #[error("unknown figure '{0}'")]
    UnknownFigure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
