use thiserror::Error;

/// Errors raised by the library. Audit failures are never errors; they are
/// reported through [`crate::audit::Verdict`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsError {
    /// A point or argument lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Picard orbit left the domain of its space.
    #[error("orbit escaped the domain at iteration {iteration}: {point}")]
    Escaped { iteration: usize, point: f64 },

    /// Invalid construction parameters, unknown names, empty samples.
    #[error("configuration error: {0}")]
    Config(String),

    /// A precondition of a check does not hold (e.g. a symmetric space is required).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A metric or map produced a NaN or infinite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An internal invariant was violated.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("expression parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, CsError>;
