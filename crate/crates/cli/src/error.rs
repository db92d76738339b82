use thiserror::Error;
use wbc_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// Process exit code: 2 parse, 3 premise, 4 inadmissible, 5 cap, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(e) => match e {
                CoreError::Premise(_) | CoreError::NotDeterministic(_) => 3,
                CoreError::Inadmissible(_) => 4,
                CoreError::CapExceeded(_) | CoreError::TableTooLarge { .. } => 5,
                _ => 2,
            },
            CliError::Io { .. } | CliError::Failed(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
