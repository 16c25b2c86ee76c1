//! Lexicon- and rule-based POS tagging.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use super::{PosTag, Token};

const CLOSED_CLASS: &str = include_str!("data/closed_class.tsv");
const OPEN_CLASS: &str = include_str!("data/open_class.tsv");
const ABBREVIATIONS: &str = include_str!("data/abbreviations.txt");

/// Bundled lexicons, parsed once and shared read-only.
pub struct Lexicon {
    pub closed: HashMap<String, PosTag>,
    pub open: HashMap<String, PosTag>,
    pub abbreviations: HashSet<String>,
}

impl Lexicon {
    fn parse() -> Self {
        Lexicon {
            closed: parse_tagged(CLOSED_CLASS),
            open: parse_tagged(OPEN_CLASS),
            abbreviations: ABBREVIATIONS
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect(),
        }
    }
}

fn parse_tagged(data: &str) -> HashMap<String, PosTag> {
    let mut map = HashMap::new();
    for line in data.lines() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let (word, tag) = line
            .split_once('\t')
            .unwrap_or_else(|| panic!("malformed lexicon line {line:?}"));
        let tag: PosTag = tag.parse().unwrap_or_else(|e| panic!("{e} in {line:?}"));
        map.insert(word.to_string(), tag);
    }
    map
}

pub fn lexicon() -> &'static Lexicon {
    static LEXICON: OnceLock<Lexicon> = OnceLock::new();
    LEXICON.get_or_init(Lexicon::parse)
}

/// Assign one tag to every token. Pure function of the token sequence:
/// punctuation and numbers first, then the closed-class lexicon, then the
/// capitalization rule for non-sentence-initial words, then the open-class
/// lexicon, then suffix rules, then the NOUN default.
pub fn pos_tag(mut tokens: Vec<Token>) -> Vec<Token> {
    let lex = lexicon();
    let mut seen_word = false;
    for tok in tokens.iter_mut() {
        let tag = tag_one(tok, seen_word, lex);
        tok.pos = Some(tag);
        if tok.surface.chars().any(char::is_alphanumeric) {
            seen_word = true;
        }
    }
    tokens
}

fn tag_one(tok: &Token, seen_word: bool, lex: &Lexicon) -> PosTag {
    let surface = tok.surface.as_str();
    if surface.chars().all(|c| c.is_ascii_punctuation()) {
        return PosTag::Punct;
    }
    if is_numeric(surface) {
        return PosTag::Num;
    }
    if let Some(&tag) = lex.closed.get(tok.lower.as_str()) {
        return tag;
    }
    // Capitalized words that do not open the sentence are proper nouns.
    if seen_word && surface.chars().next().is_some_and(char::is_uppercase) {
        return PosTag::Propn;
    }
    if let Some(&tag) = lex.open.get(tok.lower.as_str()) {
        return tag;
    }
    if let Some(tag) = suffix_rule(&tok.lower) {
        return tag;
    }
    PosTag::Noun
}

fn is_numeric(s: &str) -> bool {
    let mut digits = false;
    for c in s.chars() {
        if c.is_ascii_digit() {
            digits = true;
        } else if !matches!(c, '.' | ',' | ':' | '/' | '-' | '%') {
            return false;
        }
    }
    digits
}

fn suffix_rule(lower: &str) -> Option<PosTag> {
    let n = lower.chars().count();
    if n >= 5 && lower.ends_with("ly") {
        return Some(PosTag::Other);
    }
    if n >= 6 && lower.ends_with("ing") {
        return Some(PosTag::Verb);
    }
    if n >= 5 && lower.ends_with("ed") {
        return Some(PosTag::Verb);
    }
    if n >= 6 && (lower.ends_with("tion") || lower.ends_with("ness") || lower.ends_with("ment")) {
        return Some(PosTag::Noun);
    }
    None
}
