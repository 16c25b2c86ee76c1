//! Desk-scale baseline scorer.
//!
//! A linear model over fixed embedding features, trained with the same
//! two-way cross-entropy objective a transformer classifier would use:
//! both candidate fills are scored, the pair of logits goes through a
//! softmax, and the gold candidate's negative log-probability is
//! minimized. The model exists to verify the pipeline end to end, not to
//! reproduce transformer accuracy.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convert::{BinaryChoiceExample, Scorer};
use crate::difficulty::{cosine_similarity, EmbeddingTable};
use crate::error::{Error, Result};
use crate::io;
use crate::scalar::{dot, Scalar};
use crate::seed;
use crate::text;

pub const FEATURE_SCHEMA_VERSION: u32 = 1;

/// Feature vector for one (prefix, option, suffix) fill.
///
/// Layout, with `d` the embedding dimension (total `4d + 3`):
/// mean prefix block, mean option block, mean suffix block, elementwise
/// product of option and prefix means, then `[cos(option, prefix),
/// cos(option, suffix), ln(1 + option token count)]`. A segment with no
/// in-vocabulary token contributes zeros and a zero cosine.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<S: Scalar> {
    pub values: Vec<S>,
}

/// Feature dimension for an embedding dimension.
pub fn feature_dim(embedding_dim: usize) -> usize {
    4 * embedding_dim + 3
}

fn segment_mean<S: Scalar>(segment: &str, table: &EmbeddingTable<S>) -> Option<Vec<S>> {
    let mut sum = vec![S::zero(); table.dim];
    let mut n = 0usize;
    for tok in text::tokenize(segment) {
        if let Some(v) = table.get(&tok.lower) {
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

fn cosine_or_zero<S: Scalar>(u: Option<&[S]>, v: Option<&[S]>) -> S {
    match (u, v) {
        (Some(u), Some(v)) => cosine_similarity(u, v).unwrap_or_else(|_| S::zero()),
        _ => S::zero(),
    }
}

/// Deterministic featurization of one candidate fill.
pub fn featurize<S: Scalar>(
    prefix: &str,
    option: &str,
    suffix: &str,
    table: &EmbeddingTable<S>,
) -> FeatureVector<S> {
    let d = table.dim;
    let prefix_mean = segment_mean(prefix, table);
    let option_mean = segment_mean(option, table);
    let suffix_mean = segment_mean(suffix, table);
    let zeros = vec![S::zero(); d];
    let pm = prefix_mean.as_deref().unwrap_or(&zeros);
    let om = option_mean.as_deref().unwrap_or(&zeros);
    let sm = suffix_mean.as_deref().unwrap_or(&zeros);

    let mut values = Vec::with_capacity(feature_dim(d));
    values.extend_from_slice(pm);
    values.extend_from_slice(om);
    values.extend_from_slice(sm);
    values.extend(om.iter().zip(pm).map(|(&o, &p)| o * p));
    values.push(cosine_or_zero(option_mean.as_deref(), prefix_mean.as_deref()));
    values.push(cosine_or_zero(option_mean.as_deref(), suffix_mean.as_deref()));
    let option_tokens = text::token_count(option);
    values.push(S::from_f64_lossy((1.0 + option_tokens as f64).ln()));
    FeatureVector { values }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 50,
            batch_size: 32,
            seed: 13,
            l2: 1e-4,
        }
    }
}

/// Linear scorer: `z = weights . features + bias`. Weights start at zero;
/// the objective is convex, so initialization needs no randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel<S: Scalar> {
    pub weights: Vec<S>,
    pub bias: S,
    pub train_config: TrainConfig,
}

impl<S: Scalar> BaselineModel<S> {
    pub fn new(dim: usize, train_config: TrainConfig) -> Self {
        BaselineModel {
            weights: vec![S::zero(); dim],
            bias: S::zero(),
            train_config,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn logit(&self, features: &FeatureVector<S>) -> S {
        dot(&self.weights, &features.values) + self.bias
    }
}

/// Score one example's two options. `p_a` is computed with max-subtraction
/// so extreme logits cannot overflow.
pub fn score_pair<S: Scalar>(
    example: &BinaryChoiceExample,
    model: &BaselineModel<S>,
    table: &EmbeddingTable<S>,
) -> (S, S, S) {
    let fa = featurize(&example.prefix, &example.option_a, &example.suffix, table);
    let fb = featurize(&example.prefix, &example.option_b, &example.suffix, table);
    let za = model.logit(&fa);
    let zb = model.logit(&fb);
    (za, zb, softmax_a(za, zb))
}

fn softmax_a<S: Scalar>(za: S, zb: S) -> S {
    let m = za.max(zb);
    let ea = (za - m).exp();
    let eb = (zb - m).exp();
    ea / (ea + eb)
}

/// Featurized example: both option feature vectors plus the gold index.
struct Prepared<S: Scalar> {
    fa: Vec<S>,
    fb: Vec<S>,
    gold: u8,
}

fn prepare<S: Scalar>(
    examples: &[BinaryChoiceExample],
    table: &EmbeddingTable<S>,
) -> Result<Vec<Prepared<S>>> {
    examples
        .iter()
        .map(|ex| {
            let gold = ex.answer.ok_or_else(|| Error::UnlabeledExample {
                example_id: ex.example_id.clone(),
            })?;
            Ok(Prepared {
                fa: featurize(&ex.prefix, &ex.option_a, &ex.suffix, table).values,
                fb: featurize(&ex.prefix, &ex.option_b, &ex.suffix, table).values,
                gold,
            })
        })
        .collect()
}

fn example_loss<S: Scalar>(model: &BaselineModel<S>, p: &Prepared<S>) -> S {
    let za = dot(&model.weights, &p.fa) + model.bias;
    let zb = dot(&model.weights, &p.fb) + model.bias;
    let pa = softmax_a(za, zb);
    let p_gold = if p.gold == 0 { pa } else { S::one() - pa };
    -(p_gold.max(S::from_f64_lossy(f64::MIN_POSITIVE))).ln()
}

/// Mean cross-entropy plus the l2 penalty: the training objective.
fn objective<S: Scalar>(model: &BaselineModel<S>, batch: &[&Prepared<S>]) -> S {
    let ce: S = batch.iter().map(|p| example_loss(model, p)).sum();
    let n = S::from_f64_lossy(batch.len() as f64);
    let l2 = S::from_f64_lossy(model.train_config.l2);
    ce / n + l2 * dot(&model.weights, &model.weights)
}

/// Analytic gradient of [`objective`] with respect to (weights, bias).
fn gradient<S: Scalar>(model: &BaselineModel<S>, batch: &[&Prepared<S>]) -> (Vec<S>, S) {
    let dim = model.dim();
    let mut gw = vec![S::zero(); dim];
    let mut gb = S::zero();
    for p in batch {
        let za = dot(&model.weights, &p.fa) + model.bias;
        let zb = dot(&model.weights, &p.fb) + model.bias;
        let pa = softmax_a(za, zb);
        let (ya, yb) = if p.gold == 0 {
            (S::one(), S::zero())
        } else {
            (S::zero(), S::one())
        };
        let da = pa - ya;
        let db = (S::one() - pa) - yb;
        for i in 0..dim {
            gw[i] = gw[i] + da * p.fa[i] + db * p.fb[i];
        }
        gb = gb + da + db;
    }
    let n = S::from_f64_lossy(batch.len() as f64);
    let two_l2 = S::from_f64_lossy(2.0 * model.train_config.l2);
    for (i, g) in gw.iter_mut().enumerate() {
        *g = *g / n + two_l2 * model.weights[i];
    }
    (gw, gb / n)
}

fn dev_accuracy<S: Scalar>(model: &BaselineModel<S>, dev: &[Prepared<S>]) -> f64 {
    let correct = dev
        .iter()
        .filter(|p| {
            let za = dot(&model.weights, &p.fa) + model.bias;
            let zb = dot(&model.weights, &p.fb) + model.bias;
            let pred = u8::from(zb > za); // tie goes to option a
            pred == p.gold
        })
        .count();
    correct as f64 / dev.len() as f64
}

/// One row of the training log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub loss: f64,
    pub dev_accuracy: f64,
}

/// Render the training log as CSV (`epoch,loss,dev_accuracy`).
pub fn training_log_csv(log: &[EpochLog]) -> String {
    let mut out = String::from("epoch,loss,dev_accuracy\n");
    for row in log {
        out.push_str(&format!("{},{},{}\n", row.epoch, row.loss, row.dev_accuracy));
    }
    out
}

/// Train by seeded mini-batch gradient descent and return the epoch
/// snapshot with the best dev accuracy (ties earliest, including the zero
/// initialization). The log holds one row per epoch, row 0 being the
/// initialization.
pub fn train<S: Scalar>(
    train_examples: &[BinaryChoiceExample],
    dev_examples: &[BinaryChoiceExample],
    table: &EmbeddingTable<S>,
    cfg: &TrainConfig,
) -> Result<(BaselineModel<S>, Vec<EpochLog>)> {
    if train_examples.is_empty() || dev_examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let train_set = prepare(train_examples, table)?;
    let dev_set = prepare(dev_examples, table)?;
    let dim = feature_dim(table.dim);
    let mut model = BaselineModel::<S>::new(dim, cfg.clone());

    let all: Vec<&Prepared<S>> = train_set.iter().collect();
    let mut log = Vec::with_capacity(cfg.epochs + 1);
    let record = |model: &BaselineModel<S>, epoch: usize, log: &mut Vec<EpochLog>| -> f64 {
        let loss = objective(model, &all).to_f64_lossy();
        let acc = dev_accuracy(model, &dev_set);
        log.push(EpochLog {
            epoch,
            loss,
            dev_accuracy: acc,
        });
        acc
    };

    let init_acc = record(&model, 0, &mut log);
    let mut best = (model.clone(), init_acc);

    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, "shuffle"));
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size.max(1)) {
            let batch: Vec<&Prepared<S>> = chunk.iter().map(|&i| &train_set[i]).collect();
            let (gw, gb) = gradient(&model, &batch);
            let lr = S::from_f64_lossy(cfg.learning_rate);
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w = *w - lr * *g;
            }
            model.bias = model.bias - lr * gb;
        }
        let loss = objective(&model, &all).to_f64_lossy();
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                learning_rate: cfg.learning_rate,
            });
        }
        let acc = record(&model, epoch, &mut log);
        if acc > best.1 {
            best = (model.clone(), acc);
        }
    }
    Ok((best.0, log))
}

/// Compare the analytic gradient against central finite differences on a
/// seeded subset of at least 20 coordinates (bias included). Returns the
/// maximum relative error. The comparison floors its denominator at 1e-6:
/// below that scale the finite difference is cancellation noise and the
/// check degenerates to an absolute one.
pub fn gradient_check<S: Scalar>(
    model: &BaselineModel<S>,
    examples: &[BinaryChoiceExample],
    table: &EmbeddingTable<S>,
    epsilon: f64,
) -> Result<f64> {
    assert!((1e-7..=1e-3).contains(&epsilon), "epsilon out of range");
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let prepared = prepare(examples, table)?;
    let batch: Vec<&Prepared<S>> = prepared.iter().collect();
    let (gw, gb) = gradient(model, &batch);

    let n_coords = model.dim() + 1; // + bias
    let mut coords: Vec<usize> = (0..n_coords).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(model.train_config.seed, "grad-check"));
    coords.shuffle(&mut rng);
    let picked = if coords.len() <= 20 {
        &coords[..]
    } else {
        &coords[..20]
    };

    let eps = S::from_f64_lossy(epsilon);
    let mut max_rel = 0.0f64;
    for &c in picked {
        let mut plus = model.clone();
        let mut minus = model.clone();
        if c < model.dim() {
            plus.weights[c] = plus.weights[c] + eps;
            minus.weights[c] = minus.weights[c] - eps;
        } else {
            plus.bias = plus.bias + eps;
            minus.bias = minus.bias - eps;
        }
        let numeric =
            (objective(&plus, &batch) - objective(&minus, &batch)) / (S::from_f64_lossy(2.0) * eps);
        let analytic = if c < model.dim() { gw[c] } else { gb };
        let (a, n) = (analytic.to_f64_lossy(), numeric.to_f64_lossy());
        let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-6);
        max_rel = max_rel.max(rel);
    }
    Ok(max_rel)
}

// --------------------------------------------------------- learning curve

/// Accuracy after training on a split of `train_size` examples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningCurvePoint {
    pub train_size: u64,
    pub accuracy: f64,
}

/// Trapezoidal area under the accuracy curve over min-max normalized
/// log10(train size), an accuracy-scale number in [0, 1].
pub fn learning_curve_auc(points: &[LearningCurvePoint]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewCurvePoints(points.len()));
    }
    for (i, w) in points.windows(2).enumerate() {
        if w[1].train_size <= w[0].train_size {
            return Err(Error::NonIncreasingCurveSizes { index: i + 1 });
        }
    }
    let x0 = (points[0].train_size as f64).log10();
    let x1 = (points[points.len() - 1].train_size as f64).log10();
    let span = x1 - x0;
    let xs: Vec<f64> = points
        .iter()
        .map(|p| ((p.train_size as f64).log10() - x0) / span)
        .collect();
    let mut area = 0.0;
    for i in 1..points.len() {
        area += (xs[i] - xs[i - 1]) * (points[i].accuracy + points[i - 1].accuracy) / 2.0;
    }
    Ok(area)
}

// ------------------------------------------------------------- model file

/// On-disk model representation (always f64).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub train_config: TrainConfig,
    pub feature_schema_version: u32,
}

pub fn save_model<S: Scalar>(model: &BaselineModel<S>, path: &Path) -> Result<()> {
    let file = ModelFile {
        dim: model.dim(),
        weights: model.weights.iter().map(|w| w.to_f64_lossy()).collect(),
        bias: model.bias.to_f64_lossy(),
        train_config: model.train_config.clone(),
        feature_schema_version: FEATURE_SCHEMA_VERSION,
    };
    std::fs::write(path, io::sorted_json(&file) + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model<S: Scalar>(path: &Path) -> Result<BaselineModel<S>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&content).map_err(|e| Error::Model {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    if file.weights.len() != file.dim {
        return Err(Error::Model {
            path: path.to_path_buf(),
            reason: format!("dim {} != weights length {}", file.dim, file.weights.len()),
        });
    }
    if file.feature_schema_version != FEATURE_SCHEMA_VERSION {
        return Err(Error::Model {
            path: path.to_path_buf(),
            reason: format!(
                "feature schema {} unsupported (expected {FEATURE_SCHEMA_VERSION})",
                file.feature_schema_version
            ),
        });
    }
    Ok(BaselineModel {
        weights: file.weights.into_iter().map(S::from_f64_lossy).collect(),
        bias: S::from_f64_lossy(file.bias),
        train_config: file.train_config,
    })
}

/// Adapter: a model plus its embedding table is a [`Scorer`].
pub struct ModelScorer<'a, S: Scalar> {
    pub model: &'a BaselineModel<S>,
    pub table: &'a EmbeddingTable<S>,
}

impl<S: Scalar> Scorer for ModelScorer<'_, S> {
    fn score(&self, prefix: &str, option: &str, suffix: &str) -> f64 {
        let f = featurize(prefix, option, suffix, self.table);
        self.model.logit(&f).to_f64_lossy()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2() -> EmbeddingTable<f64> {
        let mut t = EmbeddingTable::new(2);
        t.insert("a", vec![1.0, 0.0]);
        t.insert("b", vec![0.0, 1.0]);
        t.insert("c", vec![1.0, 1.0]);
        t
    }

    fn example(option_a: &str, option_b: &str, answer: u8) -> BinaryChoiceExample {
        BinaryChoiceExample {
            example_id: format!("{option_a}|{option_b}|{answer}"),
            prefix: "a".into(),
            suffix: "b".into(),
            option_a: option_a.into(),
            option_b: option_b.into(),
            answer: Some(answer),
            dataset_tag: "test".into(),
        }
    }

    #[test]
    fn featurize_empty_segments_are_zero_blocks() {
        let t = table2();
        let f = featurize("", "a", "", &t);
        assert_eq!(f.values.len(), feature_dim(2));
        // prefix block, option block
        assert_eq!(&f.values[0..2], &[0.0, 0.0]);
        assert_eq!(&f.values[2..4], &[1.0, 0.0]);
        // suffix block, product block
        assert_eq!(&f.values[4..6], &[0.0, 0.0]);
        assert_eq!(&f.values[6..8], &[0.0, 0.0]);
        // cosines zero for missing segments
        assert_eq!(f.values[8], 0.0);
        assert_eq!(f.values[9], 0.0);
        // ln(1 + 1 token)
        assert!((f.values[10] - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn featurize_is_deterministic() {
        let t = table2();
        let f1 = featurize("a b", "c", "b a", &t);
        let f2 = featurize("a b", "c", "b a", &t);
        assert_eq!(f1, f2);
    }

    #[test]
    fn featurize_golden_hand_computation() {
        // prefix "a b": mean = (0.5, 0.5); option "c": (1, 1); suffix "b": (0, 1).
        let t = table2();
        let f = featurize("a b", "c", "b", &t);
        let expect_prefix = [0.5, 0.5];
        let expect_option = [1.0, 1.0];
        let expect_suffix = [0.0, 1.0];
        let expect_product = [0.5, 0.5];
        let cos_op = 1.0; // (1,1) vs (0.5,0.5)
        let cos_os = 1.0 / 2.0f64.sqrt(); // (1,1) vs (0,1)
        let len_feat = 2.0f64.ln();
        let expected: Vec<f64> = expect_prefix
            .iter()
            .chain(&expect_option)
            .chain(&expect_suffix)
            .chain(&expect_product)
            .copied()
            .chain([cos_op, cos_os, len_feat])
            .collect();
        for (got, want) in f.values.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_model_scores_half() {
        let t = table2();
        let model = BaselineModel::<f64>::new(feature_dim(2), TrainConfig::default());
        let (za, zb, pa) = score_pair(&example("a", "b", 0), &model, &t);
        assert_eq!(za, zb);
        assert!((pa - 0.5).abs() < 1e-15);
    }

    #[test]
    fn softmax_closed_form_ln3() {
        // z_a - z_b = ln 3  =>  p_a = 3/4.
        let pa: f64 = softmax_a(3.0f64.ln(), 0.0);
        assert!((pa - 0.75).abs() < 1e-12);
    }

    #[test]
    fn swapping_options_flips_probability() {
        let t = table2();
        let mut model = BaselineModel::<f64>::new(feature_dim(2), TrainConfig::default());
        for (i, w) in model.weights.iter_mut().enumerate() {
            *w = (i as f64 * 0.37).sin() * 0.5;
        }
        let ex = example("a", "c", 0);
        let mut swapped = ex.clone();
        std::mem::swap(&mut swapped.option_a, &mut swapped.option_b);
        let (_, _, pa) = score_pair(&ex, &model, &t);
        let (_, _, pa_swapped) = score_pair(&swapped, &model, &t);
        assert!((pa + pa_swapped - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let t = table2();
        let mut model = BaselineModel::<f64>::new(feature_dim(2), TrainConfig::default());
        for (i, w) in model.weights.iter_mut().enumerate() {
            *w = ((i * 31 + 7) % 13) as f64 - 6.0;
        }
        for (oa, ob) in [("a", "b"), ("a b", "c"), ("c", "a c b")] {
            let (za, zb, pa) = score_pair(&example(oa, ob, 0), &model, &t);
            let pb = softmax_a(zb, za);
            assert!((pa + pb - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_is_ln2_at_even_odds() {
        let t = table2();
        let model = BaselineModel::<f64>::new(feature_dim(2), TrainConfig::default());
        let prepared = prepare(&[example("a", "b", 0)], &t).unwrap();
        let batch: Vec<&Prepared<f64>> = prepared.iter().collect();
        let loss = objective(&model, &batch);
        assert!((loss - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn gold_logit_gradient_at_even_odds() {
        // dL/dz_gold = p_gold - 1 = -0.5 when p_gold = 0.5.
        let t = table2();
        let model = BaselineModel::<f64>::new(feature_dim(2), TrainConfig::default());
        let prepared = prepare(&[example("a", "b", 0)], &t).unwrap();
        let batch: Vec<&Prepared<f64>> = prepared.iter().collect();
        let (gw, _) = gradient(&model, &batch);
        // gw = (p_a - 1) f_a + p_b f_b = -0.5 (f_a - f_b)
        let fa = &prepared[0].fa;
        let fb = &prepared[0].fb;
        for i in 0..gw.len() {
            assert!((gw[i] - (-0.5) * (fa[i] - fb[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn bias_gradient_is_zero() {
        let t = table2();
        let mut model = BaselineModel::<f64>::new(feature_dim(2), TrainConfig::default());
        model.weights[3] = 0.7;
        let examples = vec![example("a", "b", 0), example("b", "c", 1)];
        let prepared = prepare(&examples, &t).unwrap();
        let batch: Vec<&Prepared<f64>> = prepared.iter().collect();
        let (_, gb) = gradient(&model, &batch);
        assert!(gb.abs() < 1e-15);
    }

    #[test]
    fn gradient_check_small() {
        let t = table2();
        let mut model = BaselineModel::<f64>::new(feature_dim(2), TrainConfig::default());
        for (i, w) in model.weights.iter_mut().enumerate() {
            *w = ((i as f64) * 0.61).cos() * 0.8;
        }
        let examples = vec![
            example("a", "b", 0),
            example("b", "c", 1),
            example("a b", "c", 0),
        ];
        let err = gradient_check(&model, &examples, &t, 1e-5).unwrap();
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let t = table2();
        let cfg = TrainConfig {
            epochs: 0,
            ..Default::default()
        };
        let train_set = vec![example("a", "b", 0), example("b", "a", 1)];
        let dev_set = vec![example("a", "b", 0), example("a", "b", 1)];
        let (model, log) = train(&train_set, &dev_set, &t, &cfg).unwrap();
        assert!(model.weights.iter().all(|w| *w == 0.0));
        assert_eq!(log.len(), 1);
        assert!((log[0].dev_accuracy - 0.5).abs() < 1e-12);
    }

    #[test]
    fn training_is_deterministic() {
        let t = table2();
        let cfg = TrainConfig {
            epochs: 5,
            ..Default::default()
        };
        let train_set: Vec<_> = (0..20)
            .map(|i| {
                if i % 2 == 0 {
                    example("a", "b", 0)
                } else {
                    example("b", "a", 1)
                }
            })
            .collect();
        let dev_set = train_set.clone();
        let (m1, log1) = train(&train_set, &dev_set, &t, &cfg).unwrap();
        let (m2, log2) = train(&train_set, &dev_set, &t, &cfg).unwrap();
        assert_eq!(m1.weights, m2.weights);
        assert_eq!(training_log_csv(&log1), training_log_csv(&log2));
    }

    #[test]
    fn auc_single_trapezoid() {
        let points = [
            LearningCurvePoint { train_size: 100, accuracy: 0.5 },
            LearningCurvePoint { train_size: 1000, accuracy: 0.7 },
        ];
        assert!((learning_curve_auc(&points).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn auc_flat_curve_is_constant() {
        let points: Vec<_> = [160u64, 640, 2558, 10234, 40398]
            .iter()
            .map(|&s| LearningCurvePoint { train_size: s, accuracy: 0.8 })
            .collect();
        assert!((learning_curve_auc(&points).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn auc_input_validation() {
        assert!(matches!(
            learning_curve_auc(&[LearningCurvePoint { train_size: 10, accuracy: 0.5 }]),
            Err(Error::TooFewCurvePoints(1))
        ));
        let bad = [
            LearningCurvePoint { train_size: 100, accuracy: 0.5 },
            LearningCurvePoint { train_size: 100, accuracy: 0.6 },
        ];
        assert!(matches!(
            learning_curve_auc(&bad),
            Err(Error::NonIncreasingCurveSizes { index: 1 })
        ));
    }

    #[test]
    fn model_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let mut model = BaselineModel::<f64>::new(feature_dim(2), TrainConfig::default());
        model.weights[2] = -1.25;
        model.bias = 0.5;
        save_model(&model, &path).unwrap();
        let back: BaselineModel<f64> = load_model(&path).unwrap();
        assert_eq!(back.weights, model.weights);
        assert_eq!(back.bias, model.bias);
    }

    #[test]
    fn monotone_dominance() {
        // Raising the gold logit never lowers p_gold.
        let mut last = 0.0;
        for i in 0..50 {
            let pa: f64 = softmax_a(i as f64 * 0.1, 0.3);
            assert!(pa >= last);
            last = pa;
        }
    }

    #[test]
    fn prediction_invariant_to_common_logit_shift() {
        for (za, zb) in [(0.2, -0.4), (1.0, 1.0), (-3.0, 2.0)] {
            let base = u8::from(zb > za);
            for shift in [-5.0, 0.0, 5.0] {
                let shifted = u8::from(zb + shift > za + shift);
                assert_eq!(base, shifted);
            }
        }
    }

    #[test]
    fn f32_instantiation_works() {
        let mut t = EmbeddingTable::<f32>::new(2);
        t.insert("a", vec![1.0, 0.0]);
        t.insert("b", vec![0.0, 1.0]);
        let model = BaselineModel::<f32>::new(feature_dim(2), TrainConfig::default());
        let (_, _, pa) = score_pair(&example("a", "b", 0), &model, &t);
        assert!((pa - 0.5).abs() < 1e-6);
    }
}
