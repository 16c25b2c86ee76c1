//! Corpus ingestion: read raw text files, normalize, clean and
//! sentence-split them under the configured filtering rules.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;

/// One raw text file. `doc_id` is `source_tag:relative_path` so ids stay
/// unique when several corpora are ingested together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub source_tag: String,
    pub text: String,
}

/// A cleaned sentence that passed every filter. `sent_index` is the
/// sentence's pre-filter position in its document, so provenance stays
/// traceable after filtering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanSentence {
    pub doc_id: String,
    pub sent_index: usize,
    pub text: String,
    pub source_tag: String,
}

/// Cleaning parameters. The defaults reflect single-sentence pronoun
/// resolution scale: the worked cup/chair example is 20 tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningConfig {
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Extra characters to keep beyond ASCII alphanumerics, whitespace and
    /// the punctuation set `.,;:!?'"()-`.
    #[serde(default)]
    pub extra_allowed_chars: String,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        CleaningConfig {
            min_tokens: 8,
            max_tokens: 60,
            extra_allowed_chars: String::new(),
        }
    }
}

impl CleaningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_tokens < 1 {
            return Err(Error::Config("min_tokens must be >= 1".into()));
        }
        if self.max_tokens <= self.min_tokens {
            return Err(Error::Config(format!(
                "max_tokens ({}) must exceed min_tokens ({})",
                self.max_tokens, self.min_tokens
            )));
        }
        Ok(())
    }

    fn keeps(&self, c: char) -> bool {
        c.is_ascii_alphanumeric()
            || c.is_whitespace()
            || ".,;:!?'\"()-".contains(c)
            || self.extra_allowed_chars.contains(c)
    }
}

/// Per-document cleaning counters. Aggregation is associative so documents
/// can be processed in parallel and the counts merged afterwards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CleanReport {
    pub sentences_seen: usize,
    pub sentences_kept: usize,
    pub sentences_dropped_short: usize,
    pub sentences_dropped_long: usize,
    pub sentences_dropped_charset: usize,
}

impl CleanReport {
    pub fn merge(&mut self, other: &CleanReport) {
        self.sentences_seen += other.sentences_seen;
        self.sentences_kept += other.sentences_kept;
        self.sentences_dropped_short += other.sentences_dropped_short;
        self.sentences_dropped_long += other.sentences_dropped_long;
        self.sentences_dropped_charset += other.sentences_dropped_charset;
    }
}

/// Counters for the file-reading stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub files_read: usize,
    pub files_skipped_not_utf8: usize,
    pub files_skipped_extension: usize,
    pub warnings: Vec<String>,
}

/// Load every `.txt` file under `root_path`, in lexicographically sorted
/// relative-path order. Files that do not decode as UTF-8 are reported and
/// skipped; an unreadable root is fatal.
pub fn load_corpus(
    root_path: &Path,
    source_tag: &str,
    report: &mut LoadReport,
) -> Result<Vec<RawDocument>> {
    if !root_path.is_dir() {
        return Err(Error::CorpusRoot {
            path: root_path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in walkdir::WalkDir::new(root_path).follow_links(true) {
        let entry = entry.map_err(|e| Error::CorpusRoot {
            path: root_path.to_path_buf(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        if entry.path().extension().and_then(|e| e.to_str()) == Some("txt") {
            paths.push(entry.into_path());
        } else {
            report.files_skipped_extension += 1;
        }
    }
    let mut keyed: Vec<(String, PathBuf)> = paths
        .into_iter()
        .map(|p| {
            let rel = p
                .strip_prefix(root_path)
                .unwrap_or(&p)
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            (rel, p)
        })
        .collect();
    keyed.sort();

    let mut docs = Vec::with_capacity(keyed.len());
    for (rel, path) in keyed {
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        match String::from_utf8(bytes) {
            Ok(text) => {
                report.files_read += 1;
                docs.push(RawDocument {
                    doc_id: format!("{source_tag}:{rel}"),
                    source_tag: source_tag.to_string(),
                    text: normalize_line_endings(&text),
                });
            }
            Err(_) => {
                report.files_skipped_not_utf8 += 1;
                report
                    .warnings
                    .push(format!("skipped non-UTF-8 file {}", path.display()));
            }
        }
    }
    Ok(docs)
}

fn normalize_line_endings(text: &str) -> String {
    text.replace("\r\n", "\n").replace('\r', "\n")
}

/// Clean one document and split it into filtered sentences.
///
/// CNN-style `@highlight` trailers are stripped for documents tagged `cnn`.
/// Control characters and disallowed characters are removed first so they
/// cannot mask sentence boundaries, then each sentence is
/// whitespace-collapsed and kept only when its token count lies in
/// `[min_tokens, max_tokens]`.
pub fn clean_and_segment(
    doc: &RawDocument,
    cfg: &CleaningConfig,
    report: &mut CleanReport,
) -> Vec<CleanSentence> {
    let body = if doc.source_tag == "cnn" {
        strip_highlight_trailer(&doc.text)
    } else {
        doc.text.as_str()
    };
    let scrubbed: String = body.chars().filter(|&c| cfg.keeps(c)).collect();

    let mut kept = Vec::new();
    for (sent_index, raw) in text::split_sentences(&scrubbed).into_iter().enumerate() {
        report.sentences_seen += 1;
        let collapsed = raw.split_whitespace().collect::<Vec<_>>().join(" ");
        if collapsed.is_empty() {
            report.sentences_dropped_charset += 1;
            continue;
        }
        let n = text::token_count(&collapsed);
        if n < cfg.min_tokens {
            report.sentences_dropped_short += 1;
        } else if n > cfg.max_tokens {
            report.sentences_dropped_long += 1;
        } else {
            report.sentences_kept += 1;
            kept.push(CleanSentence {
                doc_id: doc.doc_id.clone(),
                sent_index,
                text: collapsed,
                source_tag: doc.source_tag.clone(),
            });
        }
    }
    kept
}

/// Everything from the first `@highlight` marker onward is summary matter.
fn strip_highlight_trailer(text: &str) -> &str {
    match text.find("@highlight") {
        Some(pos) => &text[..pos],
        None => text,
    }
}
