use thiserror::Error;

/// Errors surfaced by the library.
///
/// `FactorBound` and `PrecisionCeiling` are resource ceilings: the input may
/// be fine, the configured search budget was not.  `Internal` means a proven
/// invariant failed at runtime and the result cannot be trusted.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("factorization bound {bound} exhausted; unfactored remainder {remainder}")]
    FactorBound { bound: usize, remainder: String },

    #[error("precision ceiling {ceiling} exceeded at place {place}")]
    PrecisionCeiling { ceiling: usize, place: String },

    /// Internal retry signal: a series coefficient past the known precision
    /// was requested.  Callers double the working precision and re-run; only
    /// if the ceiling is hit does this surface as `PrecisionCeiling`.
    #[error("series precision insufficient (needed exponent {needed})")]
    InsufficientPrecision { needed: i64 },

    #[error("quotient field of {place} has no supported rational parametrization")]
    UnsupportedQuotient { place: String },

    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag for structured output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::FactorBound { .. } => "factor-bound",
            Error::PrecisionCeiling { .. } => "precision-ceiling",
            Error::InsufficientPrecision { .. } => "insufficient-precision",
            Error::UnsupportedQuotient { .. } => "unsupported-quotient",
            Error::Parse { .. } => "parse",
            Error::Internal(_) => "internal",
        }
    }

    /// Process exit code for the CLI: 1 usage, 2 resource ceiling, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse { .. } => 1,
            Error::FactorBound { .. } | Error::PrecisionCeiling { .. } => 2,
            Error::UnsupportedQuotient { .. } => 2,
            Error::Internal(_) | Error::InsufficientPrecision { .. } => 3,
        }
    }
}
