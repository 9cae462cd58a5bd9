use std::path::PathBuf;

use locc_distill::Error as CoreError;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_UNSUPPORTED_SIZE: u8 = 4;
pub const EXIT_NUMERICAL: u8 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                CoreError::InvalidInput(_) | CoreError::Contract(_) => EXIT_USAGE,
                CoreError::Parse(_) => EXIT_PARSE,
                CoreError::UnsupportedSize { .. } => EXIT_UNSUPPORTED_SIZE,
                CoreError::Numerical(_) | CoreError::Sampling(_) => EXIT_NUMERICAL,
                CoreError::Consistency(_) => EXIT_OTHER,
            },
            CliError::Io { .. } | CliError::Csv(_) => EXIT_OTHER,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
