//! Downstream dataset adapters and the evaluation loop.
//!
//! Every supported dataset style (WinoGrande-like placeholder records,
//! WSC/DPR/KnowRef-like pronoun-span records, COPA-like cause/effect
//! records, and forged MNPP instances) converts into one binary-choice
//! schema, so a single scorer interface serves them all.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assembly::InstanceRecord;
use crate::error::{Error, Result};

/// Unified fill-in-the-blank example: `prefix ++ option ++ suffix`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryChoiceExample {
    pub example_id: String,
    pub prefix: String,
    pub suffix: String,
    pub option_a: String,
    pub option_b: String,
    /// `None` for unlabeled test sets (prediction export only).
    pub answer: Option<u8>,
    pub dataset_tag: String,
}

impl BinaryChoiceExample {
    pub fn option(&self, idx: u8) -> &str {
        if idx == 0 {
            &self.option_a
        } else {
            &self.option_b
        }
    }

    pub fn filled(&self, idx: u8) -> String {
        format!("{}{}{}", self.prefix, self.option(idx), self.suffix)
    }
}

/// Why a record was rejected; callers count these per file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub id: String,
    pub reason: String,
}

// ------------------------------------------------------------- adapters

/// Native placeholder record (WinoGrande convention: one `_` blank).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaceholderRecord {
    pub sentence_with_blank: String,
    pub option1: String,
    pub option2: String,
    #[serde(default)]
    pub answer: Option<u8>,
    pub id: String,
}

/// Split a placeholder sentence at its single `_`; answers map 1→0, 2→1.
pub fn from_placeholder_record(
    rec: &PlaceholderRecord,
) -> std::result::Result<BinaryChoiceExample, RecordError> {
    let blanks = rec.sentence_with_blank.matches('_').count();
    if blanks != 1 {
        return Err(RecordError {
            id: rec.id.clone(),
            reason: format!("expected exactly one placeholder, found {blanks}"),
        });
    }
    let pos = rec.sentence_with_blank.find('_').unwrap();
    let answer = match rec.answer {
        None => None,
        Some(1) => Some(0),
        Some(2) => Some(1),
        Some(other) => {
            return Err(RecordError {
                id: rec.id.clone(),
                reason: format!("answer must be 1 or 2, got {other}"),
            })
        }
    };
    Ok(BinaryChoiceExample {
        example_id: rec.id.clone(),
        prefix: rec.sentence_with_blank[..pos].to_string(),
        suffix: rec.sentence_with_blank[pos + 1..].to_string(),
        option_a: rec.option1.clone(),
        option_b: rec.option2.clone(),
        answer,
        dataset_tag: "placeholder".into(),
    })
}

/// Native pronoun-span record (WSC/DPR/KnowRef style).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PronounRecord {
    pub sentence: String,
    pub pronoun_char_start: usize,
    pub pronoun_char_end: usize,
    pub candidates: [String; 2],
    #[serde(default)]
    pub answer: Option<u8>,
    pub id: String,
}

/// Split around the pronoun span; the pronoun itself is replaced by the
/// filled option. A sentence-initial pronoun capitalizes the options.
pub fn from_pronoun_record(
    rec: &PronounRecord,
) -> std::result::Result<BinaryChoiceExample, RecordError> {
    let s = &rec.sentence;
    let (start, end) = (rec.pronoun_char_start, rec.pronoun_char_end);
    let valid_span = start < end
        && end <= s.len()
        && s.is_char_boundary(start)
        && s.is_char_boundary(end)
        && on_word_boundary(s, start, end);
    if !valid_span {
        return Err(RecordError {
            id: rec.id.clone(),
            reason: format!("span {start}..{end} does not address a token"),
        });
    }
    if let Some(a) = rec.answer {
        if a > 1 {
            return Err(RecordError {
                id: rec.id.clone(),
                reason: format!("answer must be 0 or 1, got {a}"),
            });
        }
    }
    let capitalize = start == 0;
    let adjust = |opt: &str| -> String {
        if capitalize {
            let mut chars = opt.chars();
            match chars.next() {
                Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
                None => String::new(),
            }
        } else {
            opt.to_string()
        }
    };
    Ok(BinaryChoiceExample {
        example_id: rec.id.clone(),
        prefix: s[..start].to_string(),
        suffix: s[end..].to_string(),
        option_a: adjust(&rec.candidates[0]),
        option_b: adjust(&rec.candidates[1]),
        answer: rec.answer,
        dataset_tag: "pronoun".into(),
    })
}

fn on_word_boundary(s: &str, start: usize, end: usize) -> bool {
    let before_ok = start == 0
        || !s[..start]
            .chars()
            .next_back()
            .is_some_and(char::is_alphanumeric);
    let after_ok = end == s.len()
        || !s[end..].chars().next().is_some_and(char::is_alphanumeric);
    before_ok && after_ok
}

/// Native COPA-style record: premise plus two full-sentence alternatives,
/// asking for the more plausible cause or effect.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CopaRecord {
    pub premise: String,
    pub choice1: String,
    pub choice2: String,
    /// "cause" or "effect".
    pub asks: String,
    #[serde(default)]
    pub answer: Option<u8>,
    pub id: String,
}

/// Premise plus connective becomes the prefix, each alternative an option,
/// with an empty suffix.
pub fn from_copa_record(rec: &CopaRecord) -> std::result::Result<BinaryChoiceExample, RecordError> {
    let connective = match rec.asks.as_str() {
        "cause" => "because",
        "effect" => "so",
        other => {
            return Err(RecordError {
                id: rec.id.clone(),
                reason: format!("asks must be \"cause\" or \"effect\", got {other:?}"),
            })
        }
    };
    let answer = match rec.answer {
        None => None,
        Some(1) => Some(0),
        Some(2) => Some(1),
        Some(other) => {
            return Err(RecordError {
                id: rec.id.clone(),
                reason: format!("answer must be 1 or 2, got {other}"),
            })
        }
    };
    let premise = rec.premise.trim_end().trim_end_matches('.');
    let lower_first = |opt: &str| -> String {
        let mut chars = opt.chars();
        match chars.next() {
            Some(c) => c.to_lowercase().collect::<String>() + chars.as_str(),
            None => String::new(),
        }
    };
    Ok(BinaryChoiceExample {
        example_id: rec.id.clone(),
        prefix: format!("{premise} {connective} "),
        suffix: String::new(),
        option_a: lower_first(&rec.choice1),
        option_b: lower_first(&rec.choice2),
        answer,
        dataset_tag: "copa".into(),
    })
}

/// Forged MNPP instances evaluate through the same schema: the halves are
/// the context, the candidates are the options.
pub fn from_mnpp_record(rec: &InstanceRecord) -> BinaryChoiceExample {
    BinaryChoiceExample {
        example_id: rec.instance.instance_id.clone(),
        prefix: rec.instance.first_half.clone(),
        suffix: rec.instance.second_half.clone(),
        option_a: rec.instance.candidate_a.clone(),
        option_b: rec.instance.candidate_b.clone(),
        answer: Some(rec.instance.label),
        dataset_tag: "mnpp".into(),
    }
}

// ------------------------------------------------------------ evaluation

/// Anything that can score a filled sentence. Higher is better.
pub trait Scorer {
    fn score(&self, prefix: &str, option: &str, suffix: &str) -> f64;
}

impl<F: Fn(&str, &str, &str) -> f64> Scorer for F {
    fn score(&self, prefix: &str, option: &str, suffix: &str) -> f64 {
        self(prefix, option, suffix)
    }
}

/// Evaluation summary. `confusion[gold][predicted]` counts examples; ties
/// are broken toward option_a and reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset_tag: String,
    pub n: usize,
    pub n_correct: usize,
    pub accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_bucket: Option<BTreeMap<String, BucketAccuracy>>,
    pub confusion: [[usize; 2]; 2],
    pub ties: usize,
    pub tie_break: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketAccuracy {
    pub n: usize,
    pub n_correct: usize,
    pub accuracy: f64,
}

/// Score both options of every example and report argmax accuracy.
/// `groups` optionally maps example_id to a grouping key (e.g. difficulty
/// bucket) for per-group sub-accuracies.
pub fn evaluate<S: Scorer + ?Sized>(
    examples: &[BinaryChoiceExample],
    scorer: &S,
    groups: Option<&BTreeMap<String, String>>,
) -> Result<EvalReport> {
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut n_correct = 0usize;
    let mut ties = 0usize;
    let mut confusion = [[0usize; 2]; 2];
    let mut per_bucket: BTreeMap<String, BucketAccuracy> = BTreeMap::new();

    for ex in examples {
        let gold = ex.answer.ok_or_else(|| Error::UnlabeledExample {
            example_id: ex.example_id.clone(),
        })?;
        let (pred, tied) = predict(ex, scorer);
        if tied {
            ties += 1;
        }
        let correct = pred == gold;
        if correct {
            n_correct += 1;
        }
        confusion[gold as usize][pred as usize] += 1;
        if let Some(groups) = groups {
            if let Some(key) = groups.get(&ex.example_id) {
                let slot = per_bucket.entry(key.clone()).or_insert(BucketAccuracy {
                    n: 0,
                    n_correct: 0,
                    accuracy: 0.0,
                });
                slot.n += 1;
                if correct {
                    slot.n_correct += 1;
                }
            }
        }
    }
    for acc in per_bucket.values_mut() {
        acc.accuracy = acc.n_correct as f64 / acc.n as f64;
    }
    let tag = examples
        .first()
        .map(|e| e.dataset_tag.clone())
        .unwrap_or_default();
    Ok(EvalReport {
        dataset_tag: tag,
        n: examples.len(),
        n_correct,
        accuracy: n_correct as f64 / examples.len() as f64,
        per_bucket: groups.map(|_| per_bucket),
        confusion,
        ties,
        tie_break: "option_a".into(),
    })
}

/// Argmax over the two filled options; ties go to option_a.
pub fn predict<S: Scorer + ?Sized>(ex: &BinaryChoiceExample, scorer: &S) -> (u8, bool) {
    let za = scorer.score(&ex.prefix, &ex.option_a, &ex.suffix);
    let zb = scorer.score(&ex.prefix, &ex.option_b, &ex.suffix);
    if zb > za {
        (1, false)
    } else {
        (0, za == zb)
    }
}

/// Export predictions for (possibly unlabeled) examples as CSV
/// `example_id,prediction`.
pub fn export_predictions<S: Scorer + ?Sized>(
    examples: &[BinaryChoiceExample],
    scorer: &S,
) -> String {
    let mut out = String::from("example_id,prediction\n");
    for ex in examples {
        let (pred, _) = predict(ex, scorer);
        out.push_str(&format!("{},{}\n", ex.example_id, pred));
    }
    out
}
