use hetlab::HetError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("invalid input: {0}")]
    Ingest(String),

    #[error(transparent)]
    Core(#[from] HetError),

    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn ingest(msg: impl Into<String>) -> Self {
        CliError::Ingest(msg.into())
    }

    /// Process exit status: 2 usage, 3 input or validation, 4 numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Ingest(_) | CliError::Io { .. } => 3,
            CliError::Core(e) if e.is_numerical() => 4,
            CliError::Core(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::usage("x").exit_code(), 2);
        assert_eq!(CliError::ingest("x").exit_code(), 3);
        assert_eq!(CliError::from(HetError::Singularity { q1: 1.0 }).exit_code(), 4);
        assert_eq!(CliError::from(HetError::DegeneratePool { row: 0, pivot: 0.0 }).exit_code(), 4);
        assert_eq!(CliError::from(HetError::InvalidWeights("w".into())).exit_code(), 3);
    }
}
