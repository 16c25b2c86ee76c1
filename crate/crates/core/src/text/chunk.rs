//! Noun-phrase chunking over tagged tokens.

use super::{NounPhrase, PosTag, Token};

/// Extract maximal, non-overlapping noun-phrases, left to right.
///
/// The chunk grammar is `DET? NUM? ADJ* (NOUN|PROPN)+`. Pronouns never form
/// candidates, so a lone PRON is not a phrase. `norm` is the lowercased
/// surface text joined with single spaces.
pub fn chunk_noun_phrases(sentence: &str, tokens: &[Token]) -> Vec<NounPhrase> {
    let tag = |i: usize| tokens[i].pos.unwrap_or(PosTag::Other);
    let mut phrases = Vec::new();
    let n = tokens.len();
    let mut i = 0;
    while i < n {
        let mut j = i;
        if tag(j) == PosTag::Det {
            j += 1;
        }
        if j < n && tag(j) == PosTag::Num {
            j += 1;
        }
        while j < n && tag(j) == PosTag::Adj {
            j += 1;
        }
        let mut k = j;
        while k < n && tag(k).is_nominal() {
            k += 1;
        }
        if k > j {
            let char_start = tokens[i].char_start;
            let char_end = tokens[k - 1].char_end;
            phrases.push(NounPhrase {
                tok_start: i,
                tok_end: k,
                char_start,
                char_end,
                text: sentence[char_start..char_end].to_string(),
                norm: tokens[i..k]
                    .iter()
                    .map(|t| t.lower.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            });
            i = k;
        } else {
            i += 1;
        }
    }
    phrases
}
