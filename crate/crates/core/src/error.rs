use thiserror::Error;

/// Errors raised by the evaluation and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point outside the Bellman domain: {0}")]
    OutsideDomain(String),

    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("non-positive denominator `{name}` = {value}")]
    NonPositiveDenominator { name: &'static str, value: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
