use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Metric data fails a structural requirement (positivity, gluing
    /// compatibility, dimension mismatch, parameter out of range).
    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    /// A scalar argument lies outside the admissible range of an operation.
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// A root was requested from a bracket that does not change sign, or the
    /// iteration failed to reach the requested residual.
    #[error("root solve failed: {0}")]
    Solve(String),

    /// A function expected to be monotone on its bracket failed the dense
    /// sampling check that guards inversion.
    #[error("monotonicity check failed: {0}")]
    Monotonicity(String),

    /// Grid resolution below the supported minimum.
    #[error("resolution too small: {0}")]
    Resolution(String),

    /// A closed-form length is not defined for the requested profile kind.
    #[error("no closed form: {0}")]
    NoClosedForm(String),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
