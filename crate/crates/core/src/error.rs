use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value produced while evaluating {what}")]
    NonFiniteValue { what: &'static str },

    #[error("non-finite input to {what}")]
    NonFiniteInput { what: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("unknown variant or tag `{0}`")]
    UnknownTag(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    OutOfDomain(String),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("problem `{0}` has no reference objective value")]
    MissingReference(String),

    #[error("no results to aggregate")]
    EmptyResults,

    #[error("missing theory constants: {0}")]
    MissingConstants(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
