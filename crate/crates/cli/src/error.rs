use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown command {0:?}")]
    UnknownCommand(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("corrupt cache entry {0}")]
    CacheCorrupt(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] amo_core::Error),
}

impl CliError {
    /// 1 for bad input, 2 for failures inside a computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownCommand(_) | Self::ConfigInvalid(_) => 1,
            Self::Core(amo_core::Error::InvalidParameter(_) | amo_core::Error::Parse(_)) => 1,
            Self::CacheCorrupt(_) | Self::Io(_) | Self::Core(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
