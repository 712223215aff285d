use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid quantum object: {0}")]
    InvalidState(String),

    #[error("fock cutoff {given} too small, need at least {required}")]
    CutoffTooSmall { given: usize, required: usize },

    #[error("embedding failed: {0}")]
    EmbeddingFailure(&'static str),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("insufficient samples: got {total}, need at least {required}")]
    InsufficientSamples { total: u64, required: u64 },

    #[error("configuration error: {0}")]
    Configuration(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
