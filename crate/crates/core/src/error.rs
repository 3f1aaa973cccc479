use thiserror::Error;

use crate::parser::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// A tree that is not a ring term (division, inversion, exp of a constant).
    #[error("malformed term: {0}")]
    MalformedTerm(String),

    #[error("variable contexts differ: [{left}] vs [{right}]")]
    ContextMismatch { left: String, right: String },

    #[error("undefined input: {0}")]
    UndefinedInput(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A documented precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Internal self-check failed; never expected on valid inputs.
    #[error("construction bug: {0}")]
    ConstructionBug(String),

    #[error("numeric range: {0}")]
    NumericRange(String),

    #[error("point outside the torus: {0}")]
    Domain(String),

    #[error("factorization budget exceeded: {reason}")]
    Budget {
        reason: String,
        /// Square-free factors found before giving up, rendered as text.
        partial: Vec<(String, u32)>,
    },

    #[error("sampling failed after {attempts} attempts: {reason}")]
    SamplingFailure { attempts: usize, reason: String },

    #[error("probe inconclusive: {0}")]
    ProbeInconclusive(String),

    #[error("variety is not free: {0}")]
    NotFree(String),
}
