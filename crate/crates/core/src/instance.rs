//! Masked noun-phrase instance generation.
//!
//! A sentence yields an instance for every noun-phrase occurrence whose
//! norm already appeared as an earlier phrase (the mask site), paired with
//! a distinct-norm phrase occurring entirely before it (the distractor).
//! Both candidates therefore appear before the masked location, mimicking
//! how a pronoun's referents precede it.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::CleanSentence;
use crate::text::NounPhrase;

/// One binary-choice instance. `first_half + candidate[label] + second_half`
/// reconstructs the source sentence byte-exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MnppInstance {
    pub instance_id: String,
    pub doc_id: String,
    pub source_tag: String,
    pub sentence: String,
    pub first_half: String,
    pub second_half: String,
    pub candidate_a: String,
    pub candidate_b: String,
    pub label: u8,
    pub masked_norm: String,
    pub distractor_norm: String,
    pub mask_char_start: usize,
    pub mask_char_end: usize,
}

impl MnppInstance {
    /// The gold candidate's surface text.
    pub fn gold_text(&self) -> &str {
        if self.label == 0 {
            &self.candidate_a
        } else {
            &self.candidate_b
        }
    }
}

/// Generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Cap on instances kept per sentence. Preference order: latest mask
    /// site first, then the distractor nearest before the mask.
    pub max_per_sentence: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_per_sentence: 2 }
    }
}

/// An instance plus the sentence index it came from, used for the stable
/// global sort before sampling. The index is pipeline metadata, not part of
/// the on-disk record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub sent_index: usize,
    pub instance: MnppInstance,
}

/// Generate every valid instance for one chunked sentence.
///
/// Deterministic for fixed `(sentence, nps, cfg, rng_seed)`: candidate order
/// is decided by a hash of the instance identity material and the seed, so
/// labels are balanced in expectation without any process-level RNG.
pub fn generate_instances(
    sentence: &CleanSentence,
    nps: &[NounPhrase],
    cfg: &GenConfig,
    rng_seed: u64,
) -> Vec<MnppInstance> {
    let mut picks: Vec<(usize, usize)> = Vec::new(); // (mask np idx, distractor np idx)
    for (oi, mask) in nps.iter().enumerate() {
        let has_earlier_gold = nps[..oi]
            .iter()
            .any(|g| g.norm == mask.norm && g.char_end < mask.char_start);
        if !has_earlier_gold {
            continue;
        }
        // Nearest earlier occurrence per distinct distractor norm.
        let mut best: Vec<(usize, usize)> = Vec::new(); // (np idx, gap)
        for (di, d) in nps[..oi].iter().enumerate() {
            if d.norm == mask.norm || d.char_end >= mask.char_start {
                continue;
            }
            let gap = mask.char_start - d.char_end;
            match best.iter_mut().find(|(bi, _)| nps[*bi].norm == d.norm) {
                Some(slot) if gap < slot.1 => *slot = (di, gap),
                Some(_) => {}
                None => best.push((di, gap)),
            }
        }
        for (di, _) in best {
            picks.push((oi, di));
        }
    }

    // Keep at most max_per_sentence: latest mask site first, then nearest
    // distractor, with the norm as a final deterministic tie-break.
    picks.sort_by(|&(oa, da), &(ob, db)| {
        let key_a = (
            std::cmp::Reverse(nps[oa].char_start),
            nps[oa].char_start - nps[da].char_end,
            nps[da].norm.clone(),
        );
        let key_b = (
            std::cmp::Reverse(nps[ob].char_start),
            nps[ob].char_start - nps[db].char_end,
            nps[db].norm.clone(),
        );
        key_a.cmp(&key_b)
    });
    picks.truncate(cfg.max_per_sentence);
    // Emission order within the sentence mirrors the global sort key.
    picks.sort_by_key(|&(oi, di)| (nps[oi].char_start, nps[di].norm.clone()));

    picks
        .into_iter()
        .map(|(oi, di)| build_instance(sentence, &nps[oi], &nps[di], rng_seed))
        .collect()
}

fn build_instance(
    sentence: &CleanSentence,
    mask: &NounPhrase,
    distractor: &NounPhrase,
    rng_seed: u64,
) -> MnppInstance {
    let text = sentence.text.as_str();
    let id_material = format!(
        "{}\u{0}{}\u{0}{}\u{0}{}",
        text, mask.char_start, mask.char_end, distractor.norm
    );
    let instance_id = hex16(Sha256::digest(id_material.as_bytes()).as_slice());

    // One hash bit decides candidate order; keyed on the identity material
    // and the run seed so it is reproducible and balanced in expectation.
    let mut h = Sha256::new();
    h.update(id_material.as_bytes());
    h.update(rng_seed.to_le_bytes());
    h.update(b"candidate-order");
    let gold_first = h.finalize()[0] & 1 == 0;

    let gold_text = mask.text.clone();
    let distractor_text = distractor.text.clone();
    let (candidate_a, candidate_b, label) = if gold_first {
        (gold_text, distractor_text, 0)
    } else {
        (distractor_text, gold_text, 1)
    };

    MnppInstance {
        instance_id,
        doc_id: sentence.doc_id.clone(),
        source_tag: sentence.source_tag.clone(),
        sentence: text.to_string(),
        first_half: text[..mask.char_start].to_string(),
        second_half: text[mask.char_end..].to_string(),
        candidate_a,
        candidate_b,
        label,
        masked_norm: mask.norm.clone(),
        distractor_norm: distractor.norm.clone(),
        mask_char_start: mask.char_start,
        mask_char_end: mask.char_end,
    }
}

fn hex16(digest: &[u8]) -> String {
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// Fraction of instances labeled 0.
pub fn label_balance(instances: &[MnppInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let zeros = instances.iter().filter(|i| i.label == 0).count();
    Ok(zeros as f64 / instances.len() as f64)
}

/// Stable global ordering applied before any sampling:
/// `(doc_id, sent_index, mask_char_start, distractor_norm)`.
pub fn sort_stable(instances: &mut [GeneratedInstance]) {
    instances.sort_by(|a, b| {
        (
            &a.instance.doc_id,
            a.sent_index,
            a.instance.mask_char_start,
            &a.instance.distractor_norm,
        )
            .cmp(&(
                &b.instance.doc_id,
                b.sent_index,
                b.instance.mask_char_start,
                &b.instance.distractor_norm,
            ))
    });
}
