//! Sentence segmentation.

use super::tag::lexicon;

/// Split text into sentences.
///
/// A boundary is a sentence-final punctuation character (`.` `!` `?`)
/// followed by whitespace and an uppercase letter. The bundled abbreviation
/// list plus a single-initial rule ("John F. Kennedy") suppress false splits
/// after periods. The remainder at end-of-text is flushed as a final
/// sentence. Concatenating the outputs preserves every non-whitespace
/// character of the input in order.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0usize;

    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        if c == '.' && is_abbreviation_period(text, i) {
            continue;
        }
        // Boundary needs whitespace then an uppercase letter.
        let after = i + c.len_utf8();
        let rest = &text[after..];
        let mut chars = rest.chars();
        match chars.next() {
            Some(w) if w.is_whitespace() => {}
            _ => continue,
        }
        let next_word_start = rest
            .char_indices()
            .find(|(_, ch)| !ch.is_whitespace())
            .map(|(j, ch)| (after + j, ch));
        if let Some((j, ch)) = next_word_start {
            if ch.is_uppercase() {
                let piece = text[start..after].trim();
                if !piece.is_empty() {
                    sentences.push(piece.to_string());
                }
                start = j;
                // Skip the iterator forward past the consumed whitespace.
                while let Some(&(k, _)) = iter.peek() {
                    if k < j {
                        iter.next();
                    } else {
                        break;
                    }
                }
            }
        }
    }

    let tail = text[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_string());
    }
    sentences
}

/// True when the period at byte `i` ends an abbreviation or a single
/// initial rather than a sentence.
fn is_abbreviation_period(text: &str, i: usize) -> bool {
    let before = &text[..i];
    let word_start = before
        .char_indices()
        .rev()
        .take_while(|(_, ch)| ch.is_alphanumeric())
        .last()
        .map(|(j, _)| j);
    let Some(ws) = word_start else {
        return false; // period run like "..." — no word directly before
    };
    let word = &before[ws..];
    if word.chars().count() == 1 && word.chars().all(|ch| ch.is_alphabetic()) {
        return true; // initials: "John F. Kennedy", "U. S."
    }
    lexicon().abbreviations.contains(word.to_lowercase().as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sentences() {
        assert_eq!(
            split_sentences("A cat sat. It slept."),
            vec!["A cat sat.", "It slept."]
        );
    }

    #[test]
    fn abbreviation_guard() {
        assert_eq!(
            split_sentences("Dr. Smith arrived."),
            vec!["Dr. Smith arrived."]
        );
    }

    #[test]
    fn empty_input() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   ").is_empty());
    }

    #[test]
    fn initials_do_not_split() {
        assert_eq!(
            split_sentences("John F. Kennedy spoke. The crowd cheered."),
            vec!["John F. Kennedy spoke.", "The crowd cheered."]
        );
    }

    #[test]
    fn ellipsis_splits_once() {
        assert_eq!(split_sentences("Wait... No."), vec!["Wait...", "No."]);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(
            split_sentences("It fell. and broke."),
            vec!["It fell. and broke."]
        );
    }

    #[test]
    fn question_and_exclamation() {
        assert_eq!(
            split_sentences("Did it fit? No! It was too big."),
            vec!["Did it fit?", "No!", "It was too big."]
        );
    }

    #[test]
    fn concatenation_preserves_content() {
        let input = "Mr. Jones put the cup on the chair.  He left!\nShe stayed? Yes.";
        let joined = split_sentences(input).join(" ");
        let collapse = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        assert_eq!(collapse(&joined), collapse(input));
    }
}
