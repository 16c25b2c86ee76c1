//! Build masked noun-phrase prediction (MNPP) datasets from raw text corpora.
//!
//! The pipeline turns directories of plain-text files into binary-choice
//! training instances: a sentence is split around one occurrence of a
//! noun-phrase and the model must pick the masked phrase over a distractor
//! phrase, where both candidates occur earlier in the sentence. The same
//! binary-choice schema is used for converted pronoun-resolution evaluation
//! sets, so one scorer interface serves both.
//!
//! Modules follow the pipeline order:
//!
//! * [`ingest`] — read corpora, clean and sentence-split text
//! * [`text`] — tokenizer, POS tagger and noun-phrase chunker
//! * [`instance`] — instance generation under the positional constraint
//! * [`difficulty`] — candidate-similarity scoring and easy/medium/hard split
//! * [`assembly`] — dedup, sampling, train/dev split, manifest emission
//! * [`convert`] — downstream dataset adapters and the evaluation loop
//! * [`baseline`] — linear scorer trained with two-way cross-entropy
//! * [`pipeline`] — end-to-end orchestration used by the CLI
//!
//! Numeric code is generic over [`scalar::Scalar`] (`f32` or `f64`); the
//! aliases below fix the `f64` instantiations used by the CLI and the file
//! formats.

pub mod assembly;
pub mod baseline;
pub mod config;
pub mod convert;
pub mod difficulty;
pub mod error;
pub mod ingest;
pub mod instance;
pub mod io;
pub mod pipeline;
pub mod scalar;
pub mod seed;
pub mod text;

pub use error::{Error, Result};

/// Scalar type used by the CLI and all on-disk formats.
pub type DefaultScalar = f64;

/// `f64`-backed embedding table, as loaded from embedding files.
pub type EmbeddingTable = difficulty::EmbeddingTable<DefaultScalar>;
/// `f64`-backed scored instance.
pub type ScoredInstance = difficulty::ScoredInstance<DefaultScalar>;
/// `f64`-backed linear scorer.
pub type BaselineModel = baseline::BaselineModel<DefaultScalar>;
/// `f64`-backed feature vector.
pub type FeatureVector = baseline::FeatureVector<DefaultScalar>;

/// Version string stamped into manifests and model files.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
