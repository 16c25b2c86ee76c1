//! Error type shared across the pipeline.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Fatal pipeline errors. Recoverable per-record problems (undecodable
/// files, malformed adapter records) are counted in run reports instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read corpus root {path}: {source}")]
    CorpusRoot {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("nothing to emit")]
    NothingToEmit,

    #[error("requested {requested} of {available}")]
    TargetExceedsSupply { requested: usize, available: usize },

    #[error("train/dev split needs at least 2 distinct doc_ids, got {0}")]
    TooFewDocuments(usize),

    #[error("embedding file {path} is empty")]
    EmptyEmbeddingFile { path: PathBuf },

    #[error("embedding file {path} line {line}: expected {expected} components, found {found}")]
    EmbeddingDimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("embedding file {path} line {line}: {reason}")]
    EmbeddingParse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("degenerate vector")]
    DegenerateVector,

    #[error("unlabeled example in eval: {example_id}")]
    UnlabeledExample { example_id: String },

    #[error("non-finite loss at epoch {epoch} (learning_rate {learning_rate})")]
    NonFiniteLoss { epoch: usize, learning_rate: f64 },

    #[error("learning-curve AUC needs at least 2 points, got {0}")]
    TooFewCurvePoints(usize),

    #[error("learning-curve sizes must be strictly increasing (point {index})")]
    NonIncreasingCurveSizes { index: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("bad record in {path} line {line}: {reason}")]
    Record {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("model file {path}: {reason}")]
    Model { path: PathBuf, reason: String },
}

impl Error {
    /// Attach path context to a raw I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
