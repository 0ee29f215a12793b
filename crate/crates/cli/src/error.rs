use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] qthermo::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn config(line: usize, msg: impl Into<String>) -> Self {
        CliError::Config { line, msg: msg.into() }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 0 success, 1 usage or config, 2 numerical failure, 3 witness inapplicable.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(qthermo::Error::Numerical(_)) => 2,
            CliError::Core(qthermo::Error::WitnessInapplicable(_)) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
