use thiserror::Error;

use crate::qexpr::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QError {
    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,
    #[error("negative exponent q^{exponent} where a polynomial was required")]
    NotAPolynomial { exponent: i64 },
    #[error("coefficient of q^{exponent} is not an integer: {value}")]
    NonIntegerCoefficient { exponent: i64, value: String },
    #[error("negative exponent q^{exponent} cannot be represented as a power series")]
    NotAPowerSeries { exponent: i64 },
    #[error("divergent product: {0}")]
    DivergentSpec(String),
    #[error("non-integral exponent {value} at j = {j}")]
    NonIntegerExponent { j: i64, value: String },
    #[error("alternating sum has unbounded support in j")]
    UnboundedSum,
    #[error("{0} is not a Laurent polynomial")]
    NotLaurent(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown family '{0}'")]
    NotFound(String),
    #[error("unknown instance tag '{0}'")]
    InvalidTag(String),
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("invalid base: {0}")]
    InvalidBase(String),
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("checkpoint line {line}: {msg}")]
    Checkpoint { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
    #[error("report: {0}")]
    Report(String),
}

impl From<std::io::Error> for QError {
    fn from(e: std::io::Error) -> Self {
        QError::Io(e.to_string())
    }
}

pub type Result<T, E = QError> = std::result::Result<T, E>;
