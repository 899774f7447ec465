use thiserror::Error;

/// Errors raised by the calibration library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient measurements: {required} required, {found} given")]
    InsufficientMeasurements { required: usize, found: usize },

    #[error("degenerate motion: {0}")]
    DegenerateMotion(String),

    #[error("null-space anomaly: {0}")]
    NullspaceAnomaly(String),

    #[error("no real root for the null-space combination (discriminant {0:.3e})")]
    NoRealRoot(f64),

    #[error("singular input: smallest singular value {0:.3e}")]
    SingularInput(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("infeasible solver specification: {0}")]
    InfeasibleSpec(String),

    #[error("missing estimate: {0}")]
    MissingEstimate(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse error class, used to map failures onto CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Parse,
    Validation,
    Solver,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) | Error::Io(_) => ErrorClass::Parse,
            Error::InsufficientMeasurements { .. }
            | Error::InvariantViolation(_)
            | Error::DegenerateMotion(_) => ErrorClass::Validation,
            Error::InfeasibleSpec(_) | Error::UnsupportedRepresentation(_) => ErrorClass::Usage,
            Error::NullspaceAnomaly(_)
            | Error::NoRealRoot(_)
            | Error::SingularInput(_)
            | Error::DimensionMismatch(_)
            | Error::MissingEstimate(_) => ErrorClass::Solver,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
