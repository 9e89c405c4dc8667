use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("input: {0}")]
    Input(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 usage, 2 I/O or malformed input, 3 internal invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<ftconn_core::scheme::BuildError> for CliError {
    fn from(e: ftconn_core::scheme::BuildError) -> Self {
        use ftconn_core::scheme::BuildError;
        match e {
            BuildError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Invariant(other.to_string()),
        }
    }
}
