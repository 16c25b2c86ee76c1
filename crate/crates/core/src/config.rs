//! Declarative run configuration (TOML) and its canonical hash.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assembly::AssemblyConfig;
use crate::baseline::TrainConfig;
use crate::difficulty::Bucket;
use crate::error::{Error, Result};
use crate::ingest::CleaningConfig;
use crate::instance::GenConfig;

/// One corpus directory with its source tag (e.g. "cnn", "gutenberg").
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub path: PathBuf,
    pub tag: String,
}

/// Difficulty section: pointing at an embedding file enables the
/// similarity-bucketing stage during forge.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DifficultyConfig {
    pub embeddings: Option<PathBuf>,
}

/// Assembly section as written in the config file. The runtime
/// [`AssemblyConfig`] additionally carries the resolved global seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssemblySection {
    pub target_size: Option<usize>,
    pub dev_fraction: f64,
    pub dedup: bool,
    pub bucket_filter: Option<Bucket>,
    pub source_weights: Option<BTreeMap<String, f64>>,
}

impl Default for AssemblySection {
    fn default() -> Self {
        AssemblySection {
            target_size: None,
            dev_fraction: 0.05,
            dedup: true,
            bucket_filter: None,
            source_weights: None,
        }
    }
}

impl AssemblySection {
    pub fn to_assembly_config(&self, seed: u64) -> AssemblyConfig {
        AssemblyConfig {
            target_size: self.target_size,
            seed,
            dev_fraction: self.dev_fraction,
            dedup: self.dedup,
            bucket_filter: self.bucket_filter,
            source_weights: self.source_weights.clone(),
        }
    }
}

/// Whole-run configuration. Relative paths are resolved against the
/// config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub name: String,
    pub seed: u64,
    pub corpora: Vec<CorpusSpec>,
    pub cleaning: CleaningConfig,
    pub generation: GenConfig,
    pub difficulty: DifficultyConfig,
    pub assembly: AssemblySection,
    pub training: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            name: "dataset".into(),
            seed: 0,
            corpora: Vec::new(),
            cleaning: CleaningConfig::default(),
            generation: GenConfig::default(),
            difficulty: DifficultyConfig::default(),
            assembly: AssemblySection::default(),
            training: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parse a config file and resolve its relative paths against the
    /// file's directory. `seed_override` (from `--seed`) replaces the
    /// config seed before hashing, so the hash covers the effective run.
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<RunConfig> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = toml::from_str(&content)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(seed) = seed_override {
            cfg.seed = seed;
        }
        let base = path.parent().unwrap_or(Path::new("."));
        for corpus in cfg.corpora.iter_mut() {
            corpus.path = resolve(base, &corpus.path);
        }
        if let Some(e) = cfg.difficulty.embeddings.take() {
            cfg.difficulty.embeddings = Some(resolve(base, &e));
        }
        Ok(cfg)
    }

    /// Validate everything that must hold before a forge run.
    pub fn validate_for_forge(&self) -> Result<()> {
        if self.corpora.is_empty() {
            return Err(Error::Config("no [[corpora]] entries".into()));
        }
        for c in &self.corpora {
            if !c.path.is_dir() {
                return Err(Error::Config(format!(
                    "corpus path {} does not exist",
                    c.path.display()
                )));
            }
            if c.tag.is_empty() {
                return Err(Error::Config("corpus tag must be non-empty".into()));
            }
        }
        self.cleaning.validate()?;
        if self.generation.max_per_sentence == 0 {
            return Err(Error::Config("max_per_sentence must be positive".into()));
        }
        self.assembly
            .to_assembly_config(self.seed)
            .validate()?;
        if let Some(e) = &self.difficulty.embeddings {
            if !e.is_file() {
                return Err(Error::Config(format!(
                    "embeddings file {} does not exist",
                    e.display()
                )));
            }
        }
        if self.assembly.bucket_filter.is_some() && self.difficulty.embeddings.is_none() {
            return Err(Error::Config(
                "bucket_filter requires difficulty.embeddings".into(),
            ));
        }
        Ok(())
    }

    /// Stable digest of the canonicalized (sorted-key JSON) document.
    pub fn config_hash(&self) -> String {
        let canonical = crate::io::sorted_json(self);
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..16].iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
