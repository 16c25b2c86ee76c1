//! End-to-end orchestration used by the CLI: forge, bucket, assemble,
//! convert, train, eval, auc and stats as library functions.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{self, DatasetManifest, InstanceRecord};
use crate::baseline::{self, LearningCurvePoint, ModelScorer, TrainConfig};
use crate::config::RunConfig;
use crate::convert::{self, BinaryChoiceExample, EvalReport};
use crate::difficulty::{self, EmbeddingTable};
use crate::error::{Error, Result};
use crate::ingest::{self, CleanReport, CleanSentence, LoadReport};
use crate::instance::{self, GeneratedInstance};
use crate::io;
use crate::seed;
use crate::text;
use crate::DefaultScalar;

/// Counters and manifest from one forge run.
#[derive(Debug, Clone, Serialize)]
pub struct ForgeOutcome {
    pub manifest: DatasetManifest,
    pub load: LoadReport,
    pub clean: CleanReport,
    pub instances_generated: usize,
    pub duplicates_removed: usize,
    pub similarity_missing: usize,
}

/// Run a stage under a bounded rayon pool. `jobs = 0` means the rayon
/// default (all processors). Output never depends on the pool size: every
/// parallel map preserves input order and every reduction is associative.
fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Full pipeline: ingest -> clean -> chunk -> generate -> (bucket) ->
/// assemble -> emit. Deterministic for fixed config, seed and corpora,
/// independent of `jobs`.
pub fn forge(cfg: &RunConfig, out_dir: &Path, jobs: usize) -> Result<ForgeOutcome> {
    cfg.validate_for_forge()?;
    let candidate_seed = seed::derive(cfg.seed, "candidate-order");

    let mut load = LoadReport::default();
    let mut docs = Vec::new();
    for corpus in &cfg.corpora {
        docs.extend(ingest::load_corpus(&corpus.path, &corpus.tag, &mut load)?);
    }

    let (mut generated, clean) = with_pool(jobs, || {
        let per_doc: Vec<(Vec<GeneratedInstance>, CleanReport)> = docs
            .par_iter()
            .map(|doc| {
                let mut report = CleanReport::default();
                let sentences = ingest::clean_and_segment(doc, &cfg.cleaning, &mut report);
                let mut out = Vec::new();
                for sentence in &sentences {
                    for inst in generate_for_sentence(sentence, &cfg.generation, candidate_seed) {
                        out.push(GeneratedInstance {
                            sent_index: sentence.sent_index,
                            instance: inst,
                        });
                    }
                }
                (out, report)
            })
            .collect();
        let mut clean = CleanReport::default();
        let mut generated = Vec::new();
        for (insts, report) in per_doc {
            clean.merge(&report);
            generated.extend(insts);
        }
        (generated, clean)
    })?;

    instance::sort_stable(&mut generated);
    let records: Vec<InstanceRecord> = generated
        .into_iter()
        .map(|g| InstanceRecord::from(g.instance))
        .collect();
    let instances_generated = records.len();

    let scored = match &cfg.difficulty.embeddings {
        Some(path) => {
            let table: EmbeddingTable<DefaultScalar> = difficulty::load_embeddings(path)?;
            Some(score_records(records.clone(), &table)?)
        }
        None => None,
    };
    let similarity_missing = scored
        .as_ref()
        .map(|rs| rs.iter().filter(|r| r.similarity == Some(None)).count())
        .unwrap_or(0);

    let assembled_input = scored.unwrap_or(records);
    let assembly_cfg = cfg.assembly.to_assembly_config(cfg.seed);
    let (train, dev, duplicates_removed) = assemble(assembled_input, &assembly_cfg)?;

    let manifest = assembly::emit_dataset(&train, &dev, out_dir, &cfg.name, &cfg.config_hash())?;
    Ok(ForgeOutcome {
        manifest,
        load,
        clean,
        instances_generated,
        duplicates_removed,
        similarity_missing,
    })
}

fn generate_for_sentence(
    sentence: &CleanSentence,
    gen_cfg: &crate::instance::GenConfig,
    candidate_seed: u64,
) -> Vec<crate::instance::MnppInstance> {
    let tokens = text::pos_tag(text::tokenize(&sentence.text));
    let nps = text::chunk_noun_phrases(&sentence.text, &tokens);
    instance::generate_instances(sentence, &nps, gen_cfg, candidate_seed)
}

/// Dedup (optional), bucket-filter, sample and split.
fn assemble(
    records: Vec<InstanceRecord>,
    cfg: &assembly::AssemblyConfig,
) -> Result<(Vec<InstanceRecord>, Vec<InstanceRecord>, usize)> {
    cfg.validate()?;
    let (records, duplicates_removed) = if cfg.dedup {
        assembly::deduplicate(records)
    } else {
        (records, 0)
    };
    let records = match cfg.bucket_filter {
        Some(wanted) => {
            if records.iter().any(|r| r.bucket.is_none()) {
                return Err(Error::Config(
                    "bucket_filter set but records carry no bucket field".into(),
                ));
            }
            records
                .into_iter()
                .filter(|r| r.bucket == Some(wanted))
                .collect()
        }
        None => records,
    };
    let records = assembly::sample_to_size(records, cfg)?;
    let (train, dev) =
        assembly::split_train_dev(records, cfg.dev_fraction, seed::derive(cfg.seed, "split"))?;
    Ok((train, dev, duplicates_removed))
}

fn score_records(
    records: Vec<InstanceRecord>,
    table: &EmbeddingTable<DefaultScalar>,
) -> Result<Vec<InstanceRecord>> {
    let scored: Vec<difficulty::ScoredInstance<DefaultScalar>> = records
        .iter()
        .map(|r| difficulty::score_instance(r.instance.clone(), table))
        .collect();
    let bucketed = difficulty::bucketize(scored)?;
    Ok(records
        .into_iter()
        .zip(bucketed)
        .map(|(mut rec, s)| {
            rec.similarity = Some(s.similarity);
            rec.bucket = Some(s.bucket);
            rec
        })
        .collect())
}

/// Summary returned by the standalone bucket stage.
#[derive(Debug, Clone, Serialize)]
pub struct BucketSummary {
    pub n: usize,
    pub missing_similarity: usize,
    pub per_bucket: BTreeMap<String, usize>,
}

/// Standalone bucket stage: read instances, score, bucket, write augmented
/// records to `out_path`.
pub fn bucket_file(data: &Path, embeddings: &Path, out_path: &Path) -> Result<BucketSummary> {
    let records: Vec<InstanceRecord> = io::read_jsonl(data)?;
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let table: EmbeddingTable<DefaultScalar> = difficulty::load_embeddings(embeddings)?;
    let scored = score_records(records, &table)?;
    let mut per_bucket: BTreeMap<String, usize> = BTreeMap::new();
    for r in &scored {
        *per_bucket.entry(r.bucket.unwrap().to_string()).or_default() += 1;
    }
    let missing = scored.iter().filter(|r| r.similarity == Some(None)).count();
    io::write_jsonl(out_path, &scored)?;
    Ok(BucketSummary {
        n: scored.len(),
        missing_similarity: missing,
        per_bucket,
    })
}

/// Standalone assemble stage over an existing instance file.
pub fn assemble_file(
    data: &Path,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<(DatasetManifest, usize)> {
    let records: Vec<InstanceRecord> = io::read_jsonl(data)?;
    let assembly_cfg = cfg.assembly.to_assembly_config(cfg.seed);
    let (train, dev, removed) = assemble(records, &assembly_cfg)?;
    let manifest = assembly::emit_dataset(&train, &dev, out_dir, &cfg.name, &cfg.config_hash())?;
    Ok((manifest, removed))
}

/// Adapter selector shared by convert, train and eval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adapter {
    Mnpp,
    Placeholder,
    Pronoun,
    Copa,
}

impl std::str::FromStr for Adapter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "mnpp" => Adapter::Mnpp,
            "placeholder" => Adapter::Placeholder,
            "pronoun" => Adapter::Pronoun,
            "copa" => Adapter::Copa,
            other => return Err(format!("unknown adapter {other:?}")),
        })
    }
}

/// Examples loaded through an adapter, with any difficulty buckets found on
/// the records and the count of rejected records.
pub struct LoadedExamples {
    pub examples: Vec<BinaryChoiceExample>,
    pub buckets: BTreeMap<String, String>,
    pub skipped: usize,
}

/// Read a dataset file through an adapter into the unified schema.
pub fn load_examples(adapter: Adapter, data: &Path) -> Result<LoadedExamples> {
    let mut buckets = BTreeMap::new();
    let (examples, skipped) = match adapter {
        Adapter::Mnpp => {
            let records: Vec<InstanceRecord> = io::read_jsonl(data)?;
            let examples = records.iter().map(convert::from_mnpp_record).collect();
            for r in &records {
                if let Some(b) = r.bucket {
                    buckets.insert(r.instance.instance_id.clone(), b.to_string());
                }
            }
            (examples, 0)
        }
        Adapter::Placeholder => {
            let (records, bad_json) =
                io::read_jsonl_lenient::<convert::PlaceholderRecord>(data)?;
            let mut skipped = bad_json;
            let examples = records
                .iter()
                .filter_map(|r| match convert::from_placeholder_record(r) {
                    Ok(ex) => Some(ex),
                    Err(_) => {
                        skipped += 1;
                        None
                    }
                })
                .collect();
            (examples, skipped)
        }
        Adapter::Pronoun => {
            let (records, bad_json) = io::read_jsonl_lenient::<convert::PronounRecord>(data)?;
            let mut skipped = bad_json;
            let examples = records
                .iter()
                .filter_map(|r| match convert::from_pronoun_record(r) {
                    Ok(ex) => Some(ex),
                    Err(_) => {
                        skipped += 1;
                        None
                    }
                })
                .collect();
            (examples, skipped)
        }
        Adapter::Copa => {
            let (records, bad_json) = io::read_jsonl_lenient::<convert::CopaRecord>(data)?;
            let mut skipped = bad_json;
            let examples = records
                .iter()
                .filter_map(|r| match convert::from_copa_record(r) {
                    Ok(ex) => Some(ex),
                    Err(_) => {
                        skipped += 1;
                        None
                    }
                })
                .collect();
            (examples, skipped)
        }
    };
    Ok(LoadedExamples {
        examples,
        buckets,
        skipped,
    })
}

/// Convert a native dataset file into unified binary-choice JSONL.
pub fn convert_file(adapter: Adapter, data: &Path, out_path: &Path) -> Result<(usize, usize)> {
    let loaded = load_examples(adapter, data)?;
    let n = io::write_jsonl(out_path, &loaded.examples)?;
    Ok((n, loaded.skipped))
}

/// Train the baseline on forged train/dev files; writes `model.json` and
/// `training_log.csv` into `out_dir`.
pub fn train_files(
    train_path: &Path,
    dev_path: &Path,
    embeddings: &Path,
    cfg: &TrainConfig,
    out_dir: &Path,
) -> Result<(f64, usize)> {
    let table: EmbeddingTable<DefaultScalar> = difficulty::load_embeddings(embeddings)?;
    let train_set = load_examples(Adapter::Mnpp, train_path)?.examples;
    let dev_set = load_examples(Adapter::Mnpp, dev_path)?.examples;
    let (model, log) = baseline::train(&train_set, &dev_set, &table, cfg)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    baseline::save_model(&model, &out_dir.join("model.json"))?;
    let log_path = out_dir.join("training_log.csv");
    std::fs::write(&log_path, baseline::training_log_csv(&log))
        .map_err(|e| Error::io(&log_path, e))?;
    let best = log
        .iter()
        .map(|r| r.dev_accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((best, log.len().saturating_sub(1)))
}

/// Evaluate a saved model on a dataset file through an adapter.
pub fn eval_files(
    model_path: &Path,
    data: &Path,
    adapter: Adapter,
    embeddings: &Path,
    per_bucket: bool,
) -> Result<EvalReport> {
    let table: EmbeddingTable<DefaultScalar> = difficulty::load_embeddings(embeddings)?;
    let model = baseline::load_model::<DefaultScalar>(model_path)?;
    let loaded = load_examples(adapter, data)?;
    let scorer = ModelScorer {
        model: &model,
        table: &table,
    };
    let groups = per_bucket.then_some(&loaded.buckets);
    convert::evaluate(&loaded.examples, &scorer, groups)
}

/// Export predictions (for unlabeled sets) as CSV `example_id,prediction`.
pub fn predict_files(
    model_path: &Path,
    data: &Path,
    adapter: Adapter,
    embeddings: &Path,
    out_path: &Path,
) -> Result<usize> {
    let table: EmbeddingTable<DefaultScalar> = difficulty::load_embeddings(embeddings)?;
    let model = baseline::load_model::<DefaultScalar>(model_path)?;
    let loaded = load_examples(adapter, data)?;
    let scorer = ModelScorer {
        model: &model,
        table: &table,
    };
    let csv = convert::export_predictions(&loaded.examples, &scorer);
    std::fs::write(out_path, csv).map_err(|e| Error::io(out_path, e))?;
    Ok(loaded.examples.len())
}

/// Parse a learning-curve CSV (`size,accuracy`, optional header) and
/// compute its AUC.
pub fn auc_from_csv(points_path: &Path) -> Result<f64> {
    let content =
        std::fs::read_to_string(points_path).map_err(|e| Error::io(points_path, e))?;
    let mut points = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("size")) {
            continue;
        }
        let (size, acc) = line.split_once(',').ok_or_else(|| Error::Record {
            path: points_path.to_path_buf(),
            line: i + 1,
            reason: "expected size,accuracy".into(),
        })?;
        let parse_err = |e: String| Error::Record {
            path: points_path.to_path_buf(),
            line: i + 1,
            reason: e,
        };
        points.push(LearningCurvePoint {
            train_size: size
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad size: {e}")))?,
            accuracy: acc
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad accuracy: {e}")))?,
        });
    }
    baseline::learning_curve_auc(&points)
}

/// Dataset statistics for the stats subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct DatasetStats {
    pub n: usize,
    pub label_balance: f64,
    pub per_source_counts: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_bucket_counts: Option<BTreeMap<String, usize>>,
}

pub fn stats_file(data: &Path) -> Result<DatasetStats> {
    let records: Vec<InstanceRecord> = io::read_jsonl(data)?;
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut per_source: BTreeMap<String, usize> = BTreeMap::new();
    let mut per_bucket: BTreeMap<String, usize> = BTreeMap::new();
    let mut zeros = 0usize;
    for r in &records {
        *per_source.entry(r.instance.source_tag.clone()).or_default() += 1;
        if let Some(b) = r.bucket {
            *per_bucket.entry(b.to_string()).or_default() += 1;
        }
        if r.instance.label == 0 {
            zeros += 1;
        }
    }
    Ok(DatasetStats {
        n: records.len(),
        label_balance: zeros as f64 / records.len() as f64,
        per_source_counts: per_source,
        per_bucket_counts: (!per_bucket.is_empty()).then_some(per_bucket),
    })
}

/// Convenience used by tests: forge directly from in-memory sentences.
pub fn instances_from_sentences(
    sentences: &[CleanSentence],
    gen_cfg: &crate::instance::GenConfig,
    global_seed: u64,
) -> Vec<InstanceRecord> {
    let candidate_seed = seed::derive(global_seed, "candidate-order");
    let mut generated = Vec::new();
    for s in sentences {
        for inst in generate_for_sentence(s, gen_cfg, candidate_seed) {
            generated.push(GeneratedInstance {
                sent_index: s.sent_index,
                instance: inst,
            });
        }
    }
    instance::sort_stable(&mut generated);
    generated
        .into_iter()
        .map(|g| InstanceRecord::from(g.instance))
        .collect()
}

