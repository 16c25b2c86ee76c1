//! Whitespace tokenizer with punctuation detachment and clitic splitting.

use super::Token;

const CLITICS_3: [&str; 3] = ["'ll", "'re", "'ve"];
const CLITICS_2: [&str; 2] = ["'s", "'d"];

/// Tokenize a single sentence.
///
/// Splits on whitespace, detaches leading and trailing ASCII punctuation as
/// single-character tokens, and splits the clitics `'s` `n't` `'ll` `'re`
/// `'ve` `'d` off their host word. Offsets are byte offsets into `sentence`.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for (start, chunk) in whitespace_chunks(sentence) {
        let end = start + chunk.len();
        let mut s = start;
        let mut e = end;

        // Leading punctuation, one token per character.
        while s < e {
            let c = sentence[s..e].chars().next().unwrap();
            if c.is_ascii_punctuation() {
                tokens.push(Token::new(&sentence[s..s + c.len_utf8()], s, s + c.len_utf8()));
                s += c.len_utf8();
            } else {
                break;
            }
        }

        // Trailing punctuation, collected then emitted in order.
        let mut trailing = Vec::new();
        while e > s {
            let c = sentence[s..e].chars().next_back().unwrap();
            if c.is_ascii_punctuation() {
                trailing.push((e - c.len_utf8(), e));
                e -= c.len_utf8();
            } else {
                break;
            }
        }

        if e > s {
            push_with_clitic_split(sentence, s, e, &mut tokens);
        }
        for &(ts, te) in trailing.iter().rev() {
            tokens.push(Token::new(&sentence[ts..te], ts, te));
        }
    }
    tokens
}

fn whitespace_chunks(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.split_whitespace()
        .map(move |w| (w.as_ptr() as usize - s.as_ptr() as usize, w))
}

fn push_with_clitic_split(sentence: &str, s: usize, e: usize, out: &mut Vec<Token>) {
    let word = &sentence[s..e];
    if !word.is_ascii() {
        out.push(Token::new(word, s, e));
        return;
    }
    let lower = word.to_lowercase();
    let split_at = if lower.ends_with("n't") && lower.len() > 3 {
        Some(e - 3)
    } else if let Some(c) = CLITICS_3.iter().find(|c| lower.ends_with(**c)) {
        (lower.len() > c.len()).then(|| e - c.len())
    } else if let Some(c) = CLITICS_2.iter().find(|c| lower.ends_with(**c)) {
        (lower.len() > c.len()).then(|| e - c.len())
    } else {
        None
    };
    match split_at {
        Some(mid) if mid > s => {
            out.push(Token::new(&sentence[s..mid], s, mid));
            out.push(Token::new(&sentence[mid..e], mid, e));
        }
        _ => out.push(Token::new(word, s, e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn clitic_split() {
        assert_eq!(
            surfaces("The trophy doesn't fit."),
            vec!["The", "trophy", "does", "n't", "fit", "."]
        );
    }

    #[test]
    fn single_token() {
        let toks = tokenize("cup");
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].surface, "cup");
        assert_eq!((toks[0].char_start, toks[0].char_end), (0, 3));
    }

    #[test]
    fn punctuation_detachment() {
        assert_eq!(surfaces("(the chair)"), vec!["(", "the", "chair", ")"]);
        assert_eq!(surfaces("chair)."), vec!["chair", ")", "."]);
    }

    #[test]
    fn more_clitics() {
        assert_eq!(surfaces("she'll"), vec!["she", "'ll"]);
        assert_eq!(surfaces("they're"), vec!["they", "'re"]);
        assert_eq!(surfaces("we've"), vec!["we", "'ve"]);
        assert_eq!(surfaces("he'd"), vec!["he", "'d"]);
        assert_eq!(surfaces("Smith's cup,"), vec!["Smith", "'s", "cup", ","]);
        assert_eq!(surfaces("can't"), vec!["ca", "n't"]);
    }

    #[test]
    fn hyphen_stays_internal() {
        assert_eq!(surfaces("a well-known cup"), vec!["a", "well-known", "cup"]);
    }

    #[test]
    fn offsets_match_substrings() {
        let s = "She said: \"the cup (green) isn't his.\"";
        for t in tokenize(s) {
            assert_eq!(&s[t.char_start..t.char_end], t.surface);
        }
    }

    #[test]
    fn tokens_sorted_and_disjoint() {
        let toks = tokenize("The cup, (the chair) and Smith's hat aren't here.");
        for w in toks.windows(2) {
            assert!(w[0].char_end <= w[1].char_start);
        }
    }
}
