use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by ingestion, training, encoding and persistence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid split pattern {name:?}: {message}")]
    Pattern { name: String, message: String },

    #[error("failed to split text with pattern {name:?}: {message}")]
    Split { name: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid training config: {0}")]
    Config(String),

    #[error("split pattern mismatch: {left:?} vs {right:?}")]
    PatternMismatch { left: String, right: String },

    #[error("histogram csv line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("chunk is not valid UTF-8 and cannot be written to csv: {0:?}")]
    NonUtf8Chunk(Vec<u8>),

    #[error("no chunks left to train on after applying freq_cutoff={freq_cutoff}")]
    EmptyCorpus { freq_cutoff: u64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("unknown token id {id} at position {position}")]
    UnknownToken { id: u32, position: usize },

    #[error("decoded bytes are not valid UTF-8 (first bad byte at offset {offset})")]
    InvalidUtf8 { offset: usize },

    #[error("unsupported model format version {0:?}")]
    ModelVersion(String),

    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by how the caller configured things rather than
    /// by the data being processed.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Pattern { .. }
                | Error::InvalidArgument(_)
                | Error::Config(_)
                | Error::PatternMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
