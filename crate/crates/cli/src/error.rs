use thiserror::Error;

/// Input-level failures; all map to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("name not found: {0}")]
    NameNotFound(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("generator failure: {0}")]
    Generator(String),
    #[error(transparent)]
    Core(#[from] lca_core::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
