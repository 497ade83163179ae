use thiserror::Error;

/// Library-wide error type. Variants map onto the CLI exit codes: argument,
/// unsupported and configuration errors are usage problems (exit 2), resource
/// limits exit 3, failed verifications exit 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported alphabet size q={q}: {reason}")]
    UnsupportedAlphabet { q: usize, reason: String },

    #[error("no denoising threshold: restoration coefficient C = {c} is not > 1")]
    NoThreshold { c: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
