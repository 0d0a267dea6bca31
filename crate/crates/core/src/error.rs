use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:e} exceeds {allowed:e}")]
    NonHermitianInput { defect: f64, allowed: f64 },
    #[error("matrix is not symmetric: defect {defect:e}")]
    NonSymmetric { defect: f64 },
    #[error("resolvent parameter {alpha} must exceed lambda = {lambda}")]
    AlphaOutOfRange { alpha: f64, lambda: f64 },
    #[error("semigroup time must be a finite nonnegative number, got {0}")]
    NegativeTime(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{what} did not converge (relative residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },
    #[error("operation requires a self-dual isotone projection cone, got {0}")]
    ConeNotIsotone(&'static str),
    #[error("no pairing construction available for {0}")]
    PairingUnavailable(&'static str),
    #[error("vector is not in the positive cone (margin {margin:e})")]
    ConeViolation { margin: f64 },
    #[error("input must be real-valued: imaginary part {imag:e}")]
    NonRealInput { imag: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("target semigroup does not preserve the positive cone: {0}")]
    PositivityPreconditionFailed(String),
    #[error("invalid weighted space: {0}")]
    InvalidSpace(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("potential must be nonnegative, got {value} at index {index}")]
    NegativePotential { index: usize, value: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}
