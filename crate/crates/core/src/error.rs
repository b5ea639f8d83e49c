use thiserror::Error;

/// Errors raised by the library.
///
/// Everything except [`Error::Runtime`] and [`Error::Io`] is a caller mistake
/// (bad arguments, incompatible configuration) and maps to a usage failure at
/// the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("codebook of {users} users exceeds the materialization cap of {cap}")]
    CapExceeded { users: String, cap: u64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Runtime(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Runtime(_) | Error::Io(_))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
