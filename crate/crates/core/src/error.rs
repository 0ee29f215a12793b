use thiserror::Error;

/// Failure modes shared by every module of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("witness inapplicable: {0}")]
    WitnessInapplicable(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
