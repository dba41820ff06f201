//! Word vector tables: loading, saving, similarity and SGNS training.

mod sgns;
mod table;

use std::io;
use std::path::Path;

use thiserror::Error;

pub use sgns::{
    pair_gradient, pair_loss, train_sgns, NegativeSampler, PairGradient, SgnsConfig, SgnsError, SgnsModel,
    SgnsTrainer, StepScratch, Vocabulary,
};
pub use table::{cosine, EmbeddingTable, LoadStats};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {source}")]
    Read { line: usize, source: io::Error },
    #[error("vector file is empty")]
    EmptyFile,
    #[error("line {line}: expected {expected} values, found {found}")]
    RowDimension { line: usize, expected: usize, found: usize },
    #[error("line {line}: cannot parse {token:?} as a finite number")]
    BadNumber { line: usize, token: String },
    #[error("header declares {declared} words but the file has {found}")]
    HeaderCount { declared: usize, found: usize },
    #[error("vector dimension must be positive")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("word {0:?} is not in the table")]
    UnknownWord(String),
    #[error("word {0:?} has a zero vector")]
    ZeroVector(String),
    #[error("cosine of a zero vector is undefined")]
    ZeroVectorArgument,
}

impl EmbeddingError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        EmbeddingError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
