use thiserror::Error;

/// Errors raised by code construction, modulation, channel and simulation routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter violates the precondition of the requested operation.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Two vectors or codes that must agree in length do not.
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    /// More codewords were requested than the code provides.
    #[error("requested {requested} codewords but only {available} are available")]
    SizeOverflow { requested: usize, available: usize },
    /// A serialized code or constellation could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
