use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QkdError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("vector is not a unit vector (|n|^2 = {norm_sqr})")]
    NotUnit { norm_sqr: f64 },

    #[error("unknown attack model `{0}`")]
    UnknownAttack(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl QkdError {
    pub(crate) fn out_of_range(name: &'static str, value: f64, range: &'static str) -> Self {
        QkdError::OutOfRange { name, value, range }
    }
}

pub type Result<T, E = QkdError> = std::result::Result<T, E>;
