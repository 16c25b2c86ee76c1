//! Candidate-similarity difficulty scoring.
//!
//! Each instance is scored by the cosine similarity between its two
//! candidate phrase vectors; a dataset is then partitioned into hard (top
//! third in descending similarity), easy (bottom third) and medium
//! (in between). High similarity between the candidates makes the choice
//! harder, hence "hard".

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::MnppInstance;
use crate::scalar::{dot, norm, Scalar};

/// Word-to-vector table loaded from a text embedding file. Lookup is
/// case-insensitive: keys are lowercased at load time.
#[derive(Debug, Clone)]
pub struct EmbeddingTable<S: Scalar> {
    pub dim: usize,
    entries: HashMap<String, Vec<S>>,
    pub duplicate_words: usize,
}

impl<S: Scalar> EmbeddingTable<S> {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            entries: HashMap::new(),
            duplicate_words: 0,
        }
    }

    pub fn insert(&mut self, word: &str, vector: Vec<S>) {
        assert_eq!(vector.len(), self.dim, "vector dimension mismatch");
        if self.entries.insert(word.to_lowercase(), vector).is_some() {
            self.duplicate_words += 1;
        }
    }

    pub fn get(&self, word: &str) -> Option<&[S]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Load an embedding file: one entry per line, `word v1 v2 ... vd` with
/// single-space separators. The dimension is inferred from the first line;
/// later lines with a different dimension are fatal, duplicate words keep
/// the last entry and bump a warning counter.
pub fn load_embeddings<S: Scalar>(path: &Path) -> Result<EmbeddingTable<S>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut table: Option<EmbeddingTable<S>> = None;
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(' ').filter(|p| !p.is_empty());
        let word = parts.next().ok_or_else(|| Error::EmbeddingParse {
            path: path.to_path_buf(),
            line: line_no,
            reason: "missing word".into(),
        })?;
        let mut vector = Vec::new();
        for p in parts {
            let v: f64 = p.parse().map_err(|e| Error::EmbeddingParse {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("bad float {p:?}: {e}"),
            })?;
            if !v.is_finite() {
                return Err(Error::EmbeddingParse {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!("non-finite component {p:?}"),
                });
            }
            vector.push(S::from_f64_lossy(v));
        }
        let table = table.get_or_insert_with(|| EmbeddingTable::new(vector.len()));
        if vector.is_empty() || vector.len() != table.dim {
            return Err(Error::EmbeddingDimensionMismatch {
                path: path.to_path_buf(),
                line: line_no,
                expected: table.dim,
                found: vector.len(),
            });
        }
        table.insert(word, vector);
    }
    table.ok_or_else(|| Error::EmptyEmbeddingFile {
        path: path.to_path_buf(),
    })
}

/// Mean of the vectors of in-vocabulary tokens of a space-joined phrase;
/// `None` when every token is out of vocabulary.
pub fn phrase_vector<S: Scalar>(phrase_norm: &str, table: &EmbeddingTable<S>) -> Option<Vec<S>> {
    let mut sum = vec![S::zero(); table.dim];
    let mut n = 0usize;
    for tok in phrase_norm.split_whitespace() {
        if let Some(v) = table.get(tok) {
            for (s, &x) in sum.iter_mut().zip(v) {
                *s = *s + x;
            }
            n += 1;
        }
    }
    if n == 0 {
        return None;
    }
    let count = S::from_f64_lossy(n as f64);
    Some(sum.into_iter().map(|s| s / count).collect())
}

/// Cosine similarity, clamped to `[-1, 1]` against rounding. Zero-norm
/// input is an error; callers mark the instance's similarity as missing.
pub fn cosine_similarity<S: Scalar>(u: &[S], v: &[S]) -> Result<S> {
    assert_eq!(u.len(), v.len(), "dimension mismatch");
    let nu = norm(u);
    let nv = norm(v);
    if nu == S::zero() || nv == S::zero() {
        return Err(Error::DegenerateVector);
    }
    let c = dot(u, v) / (nu * nv);
    Ok(c.min(S::one()).max(-S::one()))
}

/// Difficulty bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    Easy,
    Medium,
    Hard,
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bucket::Easy => "easy",
            Bucket::Medium => "medium",
            Bucket::Hard => "hard",
        })
    }
}

impl std::str::FromStr for Bucket {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "easy" => Bucket::Easy,
            "medium" => Bucket::Medium,
            "hard" => Bucket::Hard,
            other => return Err(format!("unknown bucket {other:?}")),
        })
    }
}

/// An instance with its candidate-pair similarity and assigned bucket.
/// `similarity` is `None` when it cannot be computed (a candidate with no
/// in-vocabulary token, or a degenerate zero vector).
#[derive(Debug, Clone)]
pub struct ScoredInstance<S: Scalar> {
    pub instance: MnppInstance,
    pub similarity: Option<S>,
    pub bucket: Bucket,
}

/// Score one instance's candidate pair.
pub fn score_instance<S: Scalar>(
    instance: MnppInstance,
    table: &EmbeddingTable<S>,
) -> ScoredInstance<S> {
    let u = phrase_vector(&instance.masked_norm, table);
    let v = phrase_vector(&instance.distractor_norm, table);
    let similarity = match (u, v) {
        (Some(u), Some(v)) => cosine_similarity(&u, &v).ok(),
        _ => None,
    };
    ScoredInstance {
        instance,
        similarity,
        bucket: Bucket::Medium,
    }
}

/// Partition scored instances into difficulty buckets.
///
/// Instances are sorted by similarity descending (ties broken by
/// instance_id); the top `ceil(n/3)` become HARD and the bottom
/// `ceil((n - hard)/2)` become EASY, leaving MEDIUM in between, which keeps
/// all three bucket sizes within one of each other. Instances without a
/// similarity are assigned MEDIUM and excluded from the order statistics.
pub fn bucketize<S: Scalar>(mut scored: Vec<ScoredInstance<S>>) -> Result<Vec<ScoredInstance<S>>> {
    if scored.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut order: Vec<usize> = (0..scored.len())
        .filter(|&i| scored[i].similarity.is_some())
        .collect();
    order.sort_by(|&a, &b| {
        let sa = scored[a].similarity.unwrap();
        let sb = scored[b].similarity.unwrap();
        sb.partial_cmp(&sa)
            .expect("similarities are finite")
            .then_with(|| scored[a].instance.instance_id.cmp(&scored[b].instance.instance_id))
    });

    let n = order.len();
    let hard = n.div_ceil(3);
    let easy = (n - hard).div_ceil(2);
    for (rank, &idx) in order.iter().enumerate() {
        scored[idx].bucket = if rank < hard {
            Bucket::Hard
        } else if rank >= n - easy {
            Bucket::Easy
        } else {
            Bucket::Medium
        };
    }
    for s in scored.iter_mut() {
        if s.similarity.is_none() {
            s.bucket = Bucket::Medium;
        }
    }
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2() -> EmbeddingTable<f64> {
        let mut t = EmbeddingTable::new(2);
        t.insert("the", vec![1.0, 0.0]);
        t.insert("cup", vec![0.0, 1.0]);
        t.insert("chair", vec![1.0, 1.0]);
        t
    }

    fn inst(id: &str) -> MnppInstance {
        MnppInstance {
            instance_id: id.into(),
            doc_id: "d".into(),
            source_tag: "t".into(),
            sentence: String::new(),
            first_half: String::new(),
            second_half: String::new(),
            candidate_a: String::new(),
            candidate_b: String::new(),
            label: 0,
            masked_norm: String::new(),
            distractor_norm: String::new(),
            mask_char_start: 0,
            mask_char_end: 0,
        }
    }

    fn scored(id: &str, similarity: Option<f64>) -> ScoredInstance<f64> {
        ScoredInstance {
            instance: inst(id),
            similarity,
            bucket: Bucket::Medium,
        }
    }

    #[test]
    fn load_and_dims() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.txt");
        std::fs::write(&p, "a 1.0 0.0\nb 0.0 1.0\n").unwrap();
        let t: EmbeddingTable<f64> = load_embeddings(&p).unwrap();
        assert_eq!((t.dim, t.len()), (2, 2));
    }

    #[test]
    fn dimension_mismatch_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.txt");
        std::fs::write(&p, "a 1.0 0.0\nb 0.0 1.0\nc 1.0\n").unwrap();
        match load_embeddings::<f64>(&p) {
            Err(Error::EmbeddingDimensionMismatch { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected dimension mismatch, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.txt");
        std::fs::write(&p, "").unwrap();
        assert!(matches!(
            load_embeddings::<f64>(&p),
            Err(Error::EmptyEmbeddingFile { .. })
        ));
    }

    #[test]
    fn duplicate_word_last_wins_with_counter() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.txt");
        std::fs::write(&p, "a 1.0 0.0\na 0.0 2.0\n").unwrap();
        let t: EmbeddingTable<f64> = load_embeddings(&p).unwrap();
        assert_eq!(t.get("a").unwrap(), &[0.0, 2.0]);
        assert_eq!(t.duplicate_words, 1);
    }

    #[test]
    fn phrase_vector_mean_and_oov() {
        let t = table2();
        assert_eq!(phrase_vector("the cup", &t).unwrap(), vec![0.5, 0.5]);
        assert_eq!(phrase_vector("zzzqq", &t), None);
        assert_eq!(phrase_vector("the zzzqq", &t).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn cosine_values() {
        assert_eq!(cosine_similarity(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c: f64 = cosine_similarity(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((c - 0.7071).abs() < 1e-4);
        assert!(matches!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::DegenerateVector)
        ));
    }

    #[test]
    fn cosine_symmetry() {
        let u = [0.3, -1.2, 0.7];
        let v = [2.0, 0.1, -0.4];
        let a: f64 = cosine_similarity(&u, &v).unwrap();
        let b: f64 = cosine_similarity(&v, &u).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn nine_instances_exact_thirds() {
        let scored_in: Vec<_> = (0..9)
            .map(|i| scored(&format!("i{i}"), Some(0.9 - 0.1 * i as f64)))
            .collect();
        let out = bucketize(scored_in).unwrap();
        let buckets: Vec<Bucket> = out.iter().map(|s| s.bucket).collect();
        assert_eq!(
            buckets,
            vec![
                Bucket::Hard,
                Bucket::Hard,
                Bucket::Hard,
                Bucket::Medium,
                Bucket::Medium,
                Bucket::Medium,
                Bucket::Easy,
                Bucket::Easy,
                Bucket::Easy
            ]
        );
    }

    #[test]
    fn single_instance_is_hard() {
        let out = bucketize(vec![scored("x", Some(0.5))]).unwrap();
        assert_eq!(out[0].bucket, Bucket::Hard);
    }

    #[test]
    fn missing_goes_medium_and_is_excluded_from_order() {
        let out = bucketize(vec![
            scored("a", Some(0.9)),
            scored("b", None),
            scored("c", Some(0.1)),
        ])
        .unwrap();
        assert_eq!(out[0].bucket, Bucket::Hard);
        assert_eq!(out[1].bucket, Bucket::Medium);
        assert_eq!(out[2].bucket, Bucket::Easy);
    }

    #[test]
    fn empty_input_is_error() {
        assert!(bucketize(Vec::<ScoredInstance<f64>>::new()).is_err());
    }

    #[test]
    fn partition_sizes_within_one() {
        for n in 1..40usize {
            let scored_in: Vec<_> = (0..n)
                .map(|i| scored(&format!("i{i:03}"), Some(i as f64 / n as f64)))
                .collect();
            let out = bucketize(scored_in).unwrap();
            let count = |b: Bucket| out.iter().filter(|s| s.bucket == b).count();
            let (h, m, e) = (count(Bucket::Hard), count(Bucket::Medium), count(Bucket::Easy));
            assert_eq!(h + m + e, n);
            for (x, y) in [(h, m), (m, e), (h, e)] {
                assert!(x.abs_diff(y) <= 1, "n={n} sizes h={h} m={m} e={e}");
            }
        }
    }

    #[test]
    fn hundred_thousand_split_counts() {
        let scored_in: Vec<_> = (0..100_000)
            .map(|i| scored(&format!("i{i:06}"), Some(i as f64)))
            .collect();
        let out = bucketize(scored_in).unwrap();
        let count = |b: Bucket| out.iter().filter(|s| s.bucket == b).count();
        assert!(count(Bucket::Hard).abs_diff(33_333) <= 1);
        assert!(count(Bucket::Medium).abs_diff(33_334) <= 1);
        assert!(count(Bucket::Easy).abs_diff(33_333) <= 1);
    }

    #[test]
    fn bucket_order_statistics_respected() {
        let scored_in: Vec<_> = (0..31)
            .map(|i| scored(&format!("i{i:03}"), Some((i * 7 % 31) as f64 / 31.0)))
            .collect();
        let out = bucketize(scored_in).unwrap();
        let min_hard = out
            .iter()
            .filter(|s| s.bucket == Bucket::Hard)
            .map(|s| s.similarity.unwrap())
            .fold(f64::INFINITY, f64::min);
        let max_medium = out
            .iter()
            .filter(|s| s.bucket == Bucket::Medium)
            .map(|s| s.similarity.unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let max_easy = out
            .iter()
            .filter(|s| s.bucket == Bucket::Easy)
            .map(|s| s.similarity.unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(min_hard >= max_medium);
        assert!(max_medium >= max_easy);
    }
}
