use thiserror::Error;

/// Everything that can end a run, with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Library(#[from] hyperwalk::Error),

    #[error("tolerance check failed: {0}")]
    Tolerance(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Tolerance(_) => 3,
            CliError::Io(_) => 1,
            CliError::Library(e) => library_code(e),
        }
    }
}

fn library_code(e: &hyperwalk::Error) -> i32 {
    use hyperwalk::Error as E;
    match e {
        E::InvalidArgument(_) | E::Parse(_) | E::RankTooSmall(_) => 2,
        E::CapExceeded { .. } | E::Budget(_) | E::Overflow(_) => 4,
        E::Sample { source, .. } => library_code(source),
        _ => 1,
    }
}
