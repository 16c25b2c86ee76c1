//! Deterministic linguistic layer: sentence segmentation, tokenization,
//! POS tagging and noun-phrase chunking.
//!
//! Everything here is rule- and lexicon-based so the pipeline has no model
//! dependency and produces identical output on every platform. The bundled
//! lexicons live in `src/text/data/` and are compiled into the binary.

mod chunk;
mod sentence;
mod tag;
mod token;

pub use chunk::chunk_noun_phrases;
pub use sentence::split_sentences;
pub use tag::{lexicon, pos_tag, Lexicon};
pub use token::tokenize;

use std::fmt;
use std::str::FromStr;

/// Closed set of part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Det,
    Adj,
    Noun,
    Propn,
    Pron,
    Verb,
    Adp,
    Num,
    Punct,
    Other,
}

impl PosTag {
    pub fn is_nominal(self) -> bool {
        matches!(self, PosTag::Noun | PosTag::Propn)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PosTag::Det => "DET",
            PosTag::Adj => "ADJ",
            PosTag::Noun => "NOUN",
            PosTag::Propn => "PROPN",
            PosTag::Pron => "PRON",
            PosTag::Verb => "VERB",
            PosTag::Adp => "ADP",
            PosTag::Num => "NUM",
            PosTag::Punct => "PUNCT",
            PosTag::Other => "OTHER",
        };
        f.write_str(s)
    }
}

impl FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "DET" => PosTag::Det,
            "ADJ" => PosTag::Adj,
            "NOUN" => PosTag::Noun,
            "PROPN" => PosTag::Propn,
            "PRON" => PosTag::Pron,
            "VERB" => PosTag::Verb,
            "ADP" => PosTag::Adp,
            "NUM" => PosTag::Num,
            "PUNCT" => PosTag::Punct,
            "OTHER" => PosTag::Other,
            other => return Err(format!("unknown POS tag {other:?}")),
        })
    }
}

/// One token of a sentence. Offsets are byte offsets into the sentence
/// string, so `sentence[char_start..char_end] == surface` always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub pos: Option<PosTag>,
    pub char_start: usize,
    pub char_end: usize,
}

impl Token {
    pub(crate) fn new(surface: &str, char_start: usize, char_end: usize) -> Self {
        Token {
            surface: surface.to_string(),
            lower: surface.to_lowercase(),
            pos: None,
            char_start,
            char_end,
        }
    }
}

/// A chunked noun-phrase span over a tokenized sentence.
///
/// `norm` (lowercased surfaces joined by single spaces) is the canonical
/// identity key used for candidate matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NounPhrase {
    pub tok_start: usize,
    pub tok_end: usize,
    pub char_start: usize,
    pub char_end: usize,
    pub text: String,
    pub norm: String,
}

/// Count tokens of a sentence with the bundled tokenizer. Used by the
/// cleaning length filter.
pub fn token_count(sentence: &str) -> usize {
    tokenize(sentence).len()
}
