use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Raised when an unfold or build exceeds its configured depth bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("recursion depth exceeded the limit of {limit}")]
pub struct DepthExceeded {
    pub limit: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("{op} requires non-empty operands")]
    EmptyOperand { op: &'static str },

    #[error("{op}: value {value} is outside the domain {domain}")]
    Domain {
        op: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{op}: degenerate input ({reason})")]
    DegenerateInput { op: &'static str, reason: String },

    #[error("non-finite value {value} in {context}")]
    NonFinite { context: &'static str, value: f64 },

    #[error("activation stack exhausted before the input layer was reached")]
    MalformedStack,

    #[error("malformed network: {0}")]
    MalformedNetwork(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Depth(#[from] DepthExceeded),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported network document version `{0}`")]
    Version(String),
}

impl Error {
    pub(crate) fn dims(op: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
