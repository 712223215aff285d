use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("could not parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("embedding failed in {failures} of {trials} trials")]
    Embedding { failures: u64, trials: u64 },
    #[error("figure `{figure}` needs series `{series}`, which this report lacks")]
    MissingSeries { figure: String, series: &'static str },
    #[error(transparent)]
    Core(#[from] qsteg_core::Error),
}

impl HarnessError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        HarnessError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 configuration, 2 runtime or protocol,
    /// 3 embedding failure.
    pub fn exit_code(&self) -> i32 {
        use qsteg_core::Error as E;
        match self {
            HarnessError::Config { .. } | HarnessError::Parse(_) => 1,
            HarnessError::Core(E::InvalidParameter { .. } | E::Configuration(_)) => 1,
            HarnessError::Embedding { .. } | HarnessError::Core(E::EmbeddingFailure(_)) => 3,
            _ => 2,
        }
    }
}
