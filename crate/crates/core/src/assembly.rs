//! Dataset assembly: dedup, seeded sampling, leakage-safe train/dev split
//! and manifest emission.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::difficulty::Bucket;
use crate::error::{Error, Result};
use crate::instance::MnppInstance;
use crate::io;
use crate::seed;

/// One line of an instance file. Difficulty fields are optional so plain
/// and bucketed datasets share a schema; emission preserves whatever fields
/// the input had.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    #[serde(flatten)]
    pub instance: MnppInstance,
    /// `None` = not scored; `Some(None)` = scored but no similarity
    /// available (serialized as null).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket: Option<Bucket>,
}

impl From<MnppInstance> for InstanceRecord {
    fn from(instance: MnppInstance) -> Self {
        InstanceRecord {
            instance,
            similarity: None,
            bucket: None,
        }
    }
}

/// Assembly parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyConfig {
    /// `None` keeps everything.
    pub target_size: Option<usize>,
    pub seed: u64,
    pub dev_fraction: f64,
    pub dedup: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket_filter: Option<Bucket>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_weights: Option<BTreeMap<String, f64>>,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            target_size: None,
            seed: 0,
            dev_fraction: 0.05,
            dedup: true,
            bucket_filter: None,
            source_weights: None,
        }
    }
}

impl AssemblyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_size == Some(0) {
            return Err(Error::Config("target_size must be positive".into()));
        }
        if !(self.dev_fraction > 0.0 && self.dev_fraction <= 0.5) {
            return Err(Error::Config(format!(
                "dev_fraction must be in (0, 0.5], got {}",
                self.dev_fraction
            )));
        }
        if let Some(w) = &self.source_weights {
            if w.values().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Config("source_weights must be finite and >= 0".into()));
            }
            if w.values().all(|v| *v == 0.0) {
                return Err(Error::Config("source_weights must not all be zero".into()));
            }
        }
        Ok(())
    }
}

/// Remove exact duplicates on `(sentence, mask_char_start, distractor_norm)`;
/// the first occurrence in the (already sorted) input wins. Returns the
/// number removed.
pub fn deduplicate(records: Vec<InstanceRecord>) -> (Vec<InstanceRecord>, usize) {
    let mut seen = std::collections::HashSet::new();
    let before = records.len();
    let kept: Vec<InstanceRecord> = records
        .into_iter()
        .filter(|r| {
            seen.insert((
                r.instance.sentence.clone(),
                r.instance.mask_char_start,
                r.instance.distractor_norm.clone(),
            ))
        })
        .collect();
    let removed = before - kept.len();
    (kept, removed)
}

/// Seeded sample without replacement down to `target_size`.
///
/// Every record gets a reproducible key derived from `(seed, instance_id)`;
/// with source weights the key is an exponential race (`-ln(u)/w`), which
/// draws items with probability proportional to their weight. Input order
/// never matters: output is re-sorted to the input's order afterwards.
pub fn sample_to_size(
    records: Vec<InstanceRecord>,
    cfg: &AssemblyConfig,
) -> Result<Vec<InstanceRecord>> {
    let Some(target) = cfg.target_size else {
        return Ok(records);
    };
    let sample_seed = seed::derive(cfg.seed, "sampling");
    let weight_of = |tag: &str| -> f64 {
        match &cfg.source_weights {
            Some(w) => w.get(tag).copied().unwrap_or(0.0),
            None => 1.0,
        }
    };
    let mut keyed: Vec<(f64, usize)> = records
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            let w = weight_of(&r.instance.source_tag);
            (w > 0.0).then(|| {
                let u = seed::item_unit(sample_seed, &r.instance.instance_id);
                (-u.ln() / w, i)
            })
        })
        .collect();
    if target > keyed.len() {
        return Err(Error::TargetExceedsSupply {
            requested: target,
            available: keyed.len(),
        });
    }
    keyed.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite sampling keys")
            .then_with(|| records[a.1].instance.instance_id.cmp(&records[b.1].instance.instance_id))
    });
    let mut picked: Vec<usize> = keyed[..target].iter().map(|&(_, i)| i).collect();
    picked.sort_unstable(); // restore stable input order
    let mut by_index: Vec<Option<InstanceRecord>> = records.into_iter().map(Some).collect();
    Ok(picked
        .into_iter()
        .map(|i| by_index[i].take().expect("picked once"))
        .collect())
}

/// Seeded train/dev split with every instance of a document on the same
/// side, so near-duplicate sentences cannot leak across the split.
pub fn split_train_dev(
    records: Vec<InstanceRecord>,
    dev_fraction: f64,
    split_seed: u64,
) -> Result<(Vec<InstanceRecord>, Vec<InstanceRecord>)> {
    let mut doc_ids: Vec<&str> = records.iter().map(|r| r.instance.doc_id.as_str()).collect();
    doc_ids.sort_unstable();
    doc_ids.dedup();
    if doc_ids.len() < 2 {
        return Err(Error::TooFewDocuments(doc_ids.len()));
    }
    let target = dev_fraction * records.len() as f64;

    let mut order: Vec<(u64, String)> = doc_ids
        .iter()
        .map(|d| (seed::item_key(split_seed, d), d.to_string()))
        .collect();
    order.sort();
    let counts: std::collections::HashMap<&str, usize> =
        records
            .iter()
            .fold(std::collections::HashMap::new(), |mut m, r| {
                *m.entry(r.instance.doc_id.as_str()).or_default() += 1;
                m
            });

    let mut dev_docs = std::collections::HashSet::new();
    let mut dev_size = 0usize;
    for (_, doc) in &order {
        if (dev_size as f64) >= target {
            break;
        }
        dev_size += counts[doc.as_str()];
        dev_docs.insert(doc.clone());
    }
    // Never strand the train side without documents.
    if dev_docs.len() == doc_ids.len() {
        let (_, last) = order.iter().rfind(|(_, d)| dev_docs.contains(d)).unwrap();
        dev_docs.remove(last);
    }

    let (mut train, mut dev) = (Vec::new(), Vec::new());
    for r in records {
        if dev_docs.contains(&r.instance.doc_id) {
            dev.push(r);
        } else {
            train.push(r);
        }
    }
    Ok((train, dev))
}

/// Reproducibility manifest written alongside a forged dataset.
/// Invariant: `total == sum(per_source_counts) == train_count + dev_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub config_hash: String,
    pub per_source_counts: BTreeMap<String, usize>,
    pub total: usize,
    pub train_count: usize,
    pub dev_count: usize,
    pub label_balance: f64,
    pub tool_version: String,
}

impl DatasetManifest {
    pub fn check_arithmetic(&self) -> bool {
        let source_sum: usize = self.per_source_counts.values().sum();
        self.total == source_sum && self.total == self.train_count + self.dev_count
    }
}

/// Write `train.jsonl`, `dev.jsonl` and `manifest.json` into `out_dir`.
/// Manifest counts are computed from the records actually written.
pub fn emit_dataset(
    train: &[InstanceRecord],
    dev: &[InstanceRecord],
    out_dir: &Path,
    name: &str,
    config_hash: &str,
) -> Result<DatasetManifest> {
    if train.is_empty() && dev.is_empty() {
        return Err(Error::NothingToEmit);
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let train_count = io::write_jsonl(&out_dir.join("train.jsonl"), train)?;
    let dev_count = io::write_jsonl(&out_dir.join("dev.jsonl"), dev)?;

    let mut per_source_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut zeros = 0usize;
    for r in train.iter().chain(dev) {
        *per_source_counts
            .entry(r.instance.source_tag.clone())
            .or_default() += 1;
        if r.instance.label == 0 {
            zeros += 1;
        }
    }
    let total = train_count + dev_count;
    let manifest = DatasetManifest {
        name: name.to_string(),
        config_hash: config_hash.to_string(),
        per_source_counts,
        total,
        train_count,
        dev_count,
        label_balance: zeros as f64 / total as f64,
        tool_version: crate::TOOL_VERSION.to_string(),
    };
    debug_assert!(manifest.check_arithmetic());
    let path = out_dir.join("manifest.json");
    std::fs::write(&path, io::sorted_json(&manifest) + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, doc: &str, sentence: &str, mask: usize, distractor: &str) -> InstanceRecord {
        InstanceRecord::from(MnppInstance {
            instance_id: id.into(),
            doc_id: doc.into(),
            source_tag: "demo".into(),
            sentence: sentence.into(),
            first_half: String::new(),
            second_half: String::new(),
            candidate_a: "a".into(),
            candidate_b: "b".into(),
            label: 0,
            masked_norm: "m".into(),
            distractor_norm: distractor.into(),
            mask_char_start: mask,
            mask_char_end: mask + 1,
        })
    }

    #[test]
    fn dedup_removes_exact_key_matches() {
        let x = rec("i1", "d1", "s", 3, "the cup");
        let (out, removed) = deduplicate(vec![x.clone(), x.clone()]);
        assert_eq!((out.len(), removed), (1, 1));
        let (out, removed) = deduplicate(Vec::new());
        assert_eq!((out.len(), removed), (0, 0));
        let a = rec("i1", "d1", "s", 3, "the cup");
        let b = rec("i2", "d1", "s", 3, "the jar");
        let (out, removed) = deduplicate(vec![a, b]);
        assert_eq!((out.len(), removed), (2, 0));
    }

    #[test]
    fn dedup_is_idempotent() {
        let recs: Vec<_> = (0..20)
            .map(|i| rec(&format!("i{i}"), "d", "s", i % 5, "x"))
            .collect();
        let (once, _) = deduplicate(recs);
        let (twice, removed) = deduplicate(once.clone());
        assert_eq!(once, twice);
        assert_eq!(removed, 0);
    }

    fn many(n: usize) -> Vec<InstanceRecord> {
        (0..n)
            .map(|i| rec(&format!("i{i:04}"), &format!("doc{}", i / 10), "s", i, "x"))
            .collect()
    }

    #[test]
    fn sampling_identity_and_determinism() {
        let cfg = AssemblyConfig {
            target_size: Some(100),
            seed: 7,
            ..Default::default()
        };
        let input = many(100);
        let out = sample_to_size(input.clone(), &cfg).unwrap();
        assert_eq!(out, input);

        let cfg10 = AssemblyConfig {
            target_size: Some(10),
            seed: 7,
            ..Default::default()
        };
        let a = sample_to_size(input.clone(), &cfg10).unwrap();
        let b = sample_to_size(input.clone(), &cfg10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn sampling_overdraw_is_error() {
        let cfg = AssemblyConfig {
            target_size: Some(101),
            seed: 7,
            ..Default::default()
        };
        match sample_to_size(many(100), &cfg) {
            Err(Error::TargetExceedsSupply { requested, available }) => {
                assert_eq!((requested, available), (101, 100));
            }
            other => panic!("expected overdraw error, got {other:?}"),
        }
    }

    #[test]
    fn weighted_sampling_excludes_zero_weight_sources() {
        let mut input = many(40);
        for r in input.iter_mut().skip(20) {
            r.instance.source_tag = "other".into();
        }
        let mut weights = BTreeMap::new();
        weights.insert("demo".to_string(), 1.0);
        weights.insert("other".to_string(), 0.0);
        let cfg = AssemblyConfig {
            target_size: Some(15),
            seed: 3,
            source_weights: Some(weights),
            ..Default::default()
        };
        let out = sample_to_size(input, &cfg).unwrap();
        assert_eq!(out.len(), 15);
        assert!(out.iter().all(|r| r.instance.source_tag == "demo"));
    }

    #[test]
    fn split_groups_documents() {
        let input = many(100); // 10 docs x 10 instances
        let (train, dev) = split_train_dev(input, 0.1, 42).unwrap();
        assert_eq!(train.len() + dev.len(), 100);
        assert_eq!(dev.len(), 10, "dev should hold exactly one doc's instances");
        let dev_docs: std::collections::HashSet<_> =
            dev.iter().map(|r| r.instance.doc_id.clone()).collect();
        assert_eq!(dev_docs.len(), 1);
        for r in &train {
            assert!(!dev_docs.contains(&r.instance.doc_id));
        }
    }

    #[test]
    fn split_is_disjoint_and_deterministic() {
        let input = many(100);
        let (t1, d1) = split_train_dev(input.clone(), 0.2, 9).unwrap();
        let (t2, d2) = split_train_dev(input, 0.2, 9).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(d1, d2);
        let train_ids: std::collections::HashSet<_> =
            t1.iter().map(|r| r.instance.instance_id.clone()).collect();
        assert!(d1.iter().all(|r| !train_ids.contains(&r.instance.instance_id)));
    }

    #[test]
    fn split_needs_two_docs() {
        let recs: Vec<_> = (0..5).map(|i| rec(&format!("i{i}"), "only", "s", i, "x")).collect();
        assert!(matches!(
            split_train_dev(recs, 0.2, 1),
            Err(Error::TooFewDocuments(1))
        ));
    }

    #[test]
    fn emit_writes_consistent_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let input = many(50);
        let (train, dev) = split_train_dev(input, 0.1, 2).unwrap();
        let manifest = emit_dataset(&train, &dev, dir.path(), "demo-set", "cafe01").unwrap();
        assert!(manifest.check_arithmetic());
        assert_eq!(manifest.total, 50);
        let back: DatasetManifest = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(back, manifest);
        let train_lines: Vec<InstanceRecord> =
            io::read_jsonl(&dir.path().join("train.jsonl")).unwrap();
        assert_eq!(train_lines.len(), manifest.train_count);
    }

    #[test]
    fn emit_nothing_is_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            emit_dataset(&[], &[], dir.path(), "x", "y"),
            Err(Error::NothingToEmit)
        ));
    }

    #[test]
    fn emit_is_byte_deterministic() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let input = many(30);
        let (train, dev) = split_train_dev(input, 0.2, 5).unwrap();
        emit_dataset(&train, &dev, dir1.path(), "n", "h").unwrap();
        emit_dataset(&train, &dev, dir2.path(), "n", "h").unwrap();
        for f in ["train.jsonl", "dev.jsonl", "manifest.json"] {
            let a = std::fs::read(dir1.path().join(f)).unwrap();
            let b = std::fs::read(dir2.path().join(f)).unwrap();
            assert_eq!(a, b, "{f} differs");
        }
    }
}
