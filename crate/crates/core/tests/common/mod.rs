//! Shared helpers for integration tests: a seeded random-corpus generator
//! and paths to the bundled demo data.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use mnpp_core::ingest::CleanSentence;

pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

const NOUNS: &[&str] = &[
    "cup", "chair", "table", "dog", "horse", "coat", "wagon", "hammer", "tree", "bottle", "box",
    "cart", "farmer", "sailor", "kettle", "bench", "glove", "shovel", "lamp", "boat", "basket",
    "fox", "tailor", "sled", "jar", "stool", "scarf", "rake", "vine", "barrel",
];
const VERBS: &[&str] = &[
    "put", "placed", "moved", "dragged", "carried", "pushed", "pulled", "lifted", "dropped",
    "held", "grabbed", "fetched", "brought", "took", "found",
];
const PREPS: &[&str] = &["on", "near", "beside", "behind", "under", "toward"];
const TAILS: &[&str] = &[
    "fell", "cracked", "vanished", "wobbled", "rolled", "remained", "creaked", "rusted",
    "disappeared", "shattered",
];
const CONJS: &[&str] = &["but", "and", "so", "yet"];

/// One random sentence with a repeated noun-phrase, so it yields instances.
pub fn random_repeat_sentence(rng: &mut ChaCha8Rng) -> String {
    let mut pick = |set: &[&str]| set[rng.gen_range(0..set.len())].to_string();
    let a = pick(NOUNS);
    let b = loop {
        let b = pick(NOUNS);
        if b != a {
            break b;
        }
    };
    let (vt, tail, conj) = (pick(VERBS), pick(TAILS), pick(CONJS));
    match rng.gen_range(0..4u8) {
        0 => {
            let pp = pick(PREPS);
            let c = loop {
                let c = pick(NOUNS);
                if c != a && c != b {
                    break c;
                }
            };
            format!("The {a} {vt} the {b} {pp} the {c}, {conj} the {b} {tail}.")
        }
        1 => format!("When the {a} {vt} the {b}, the {b} {tail}."),
        2 => format!("The {a} {vt} the {b} because the {b} {tail}."),
        _ => {
            let pp = pick(PREPS);
            format!("The {a} {vt} the {b} {pp} the {a}, {conj} the {b} {tail}.")
        }
    }
}

/// Deterministic batch of cleaned sentences spread over `n_docs` documents.
pub fn random_corpus(seed: u64, n_sentences: usize, n_docs: usize) -> Vec<CleanSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_sentences)
        .map(|i| CleanSentence {
            doc_id: format!("fuzz:doc{:03}.txt", i % n_docs),
            sent_index: i / n_docs,
            text: random_repeat_sentence(&mut rng),
            source_tag: "fuzz".into(),
        })
        .collect()
}
