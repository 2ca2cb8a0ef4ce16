use std::collections::HashSet;
use std::ops::Range;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::tokens::{normalize_tokens, Token};

/// Sentences longer than this are wrapped at clause boundaries.
pub const MAX_SENTENCE_TOKENS: usize = 120;

const ABBREVIATIONS: &str = include_str!("../../resources/abbreviations.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub raw: String,
    /// Position within its license.
    pub index: usize,
    /// Byte range of `raw` in the text it was split from.
    pub span: Range<usize>,
}

impl Sentence {
    /// Builds a sentence directly from a string, tokenizing it.
    pub fn from_raw(raw: &str, index: usize) -> Self {
        Sentence {
            tokens: normalize_tokens(raw),
            raw: raw.to_string(),
            index,
            span: 0..raw.len(),
        }
    }

    /// Builds a sentence from pre-split surfaces, joined by single spaces.
    pub fn from_surfaces<S: AsRef<str>>(surfaces: &[S], index: usize) -> Self {
        let mut raw = String::new();
        let mut tokens = Vec::with_capacity(surfaces.len());
        for (position, s) in surfaces.iter().enumerate() {
            if position > 0 {
                raw.push(' ');
            }
            let offset = raw.len();
            raw.push_str(s.as_ref());
            tokens.push(Token {
                surface: s.as_ref().to_string(),
                stem: normalize_tokens(s.as_ref())
                    .into_iter()
                    .next()
                    .map(|t| t.stem)
                    .unwrap_or_else(|| s.as_ref().to_lowercase()),
                position,
                offset,
            });
        }
        let len = raw.len();
        Sentence {
            tokens,
            raw,
            index,
            span: 0..len,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn stems(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.stem.as_str())
    }
}

fn abbreviations() -> &'static HashSet<String> {
    static SET: OnceLock<HashSet<String>> = OnceLock::new();
    SET.get_or_init(|| {
        ABBREVIATIONS
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// Splits `text` into sentences. See [`split_sentences_reporting`].
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    split_sentences_reporting(text).0
}

/// Rule-based sentence splitter.
///
/// Boundaries are `. ; ! ?` followed by whitespace (or the end), blank lines,
/// and the start of a list item. A period after a guarded abbreviation
/// ("e.g.", "Sec.") is not a boundary. Each sentence's `span` points into
/// `text`, and everything between spans is whitespace. Sentences over
/// [`MAX_SENTENCE_TOKENS`] tokens are wrapped at `,`/`;`; each wrap is reported
/// in the returned warnings.
pub fn split_sentences_reporting(text: &str) -> (Vec<Sentence>, Vec<String>) {
    let mut cuts = vec![0];
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        match c {
            '.' | ';' | '!' | '?' => {
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j].1, '"' | '\'' | ')' | ']') {
                    j += 1;
                }
                let at_end = j >= chars.len();
                if (at_end || chars[j].1.is_whitespace()) && !(c == '.' && is_guarded(text, at)) {
                    cuts.push(if at_end { text.len() } else { chars[j].0 });
                    i = j;
                    continue;
                }
            }
            '\n' => {
                let rest = &text[at + 1..];
                let line = rest.split('\n').next().unwrap_or("");
                if line.trim().is_empty() || starts_list_item(line) {
                    cuts.push(at);
                }
            }
            _ => {}
        }
        i += 1;
    }
    cuts.push(text.len());
    cuts.dedup();

    let mut sentences = Vec::new();
    let mut warnings = Vec::new();
    for w in cuts.windows(2) {
        let seg = &text[w[0]..w[1]];
        let lead = seg.len() - seg.trim_start().len();
        let trimmed = seg.trim();
        if trimmed.is_empty() {
            continue;
        }
        let start = w[0] + lead;
        let tokens = normalize_tokens(trimmed);
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() > MAX_SENTENCE_TOKENS {
            warnings.push(format!(
                "sentence at byte {start} has {} tokens; wrapped at clause boundaries",
                tokens.len()
            ));
            for piece in wrap_long(&tokens) {
                let a = tokens[piece.start].offset;
                let last = &tokens[piece.end - 1];
                let b = last.offset + last.surface.len();
                push_sentence(&mut sentences, text, start + a..start + b);
            }
        } else {
            push_sentence(&mut sentences, text, start..start + trimmed.len());
        }
    }
    (sentences, warnings)
}

fn push_sentence(out: &mut Vec<Sentence>, text: &str, span: Range<usize>) {
    let raw = &text[span.clone()];
    out.push(Sentence {
        tokens: normalize_tokens(raw),
        raw: raw.to_string(),
        index: out.len(),
        span,
    });
}

fn wrap_long(tokens: &[Token]) -> Vec<Range<usize>> {
    let mut pieces = Vec::new();
    let mut start = 0;
    while tokens.len() - start > MAX_SENTENCE_TOKENS {
        let limit = start + MAX_SENTENCE_TOKENS;
        let cut = (start + 1..limit)
            .rev()
            .find(|&k| matches!(tokens[k - 1].surface.as_str(), "," | ";"))
            .unwrap_or(limit);
        pieces.push(start..cut);
        start = cut;
    }
    pieces.push(start..tokens.len());
    pieces
}

fn is_guarded(text: &str, period_at: usize) -> bool {
    let before = &text[..=period_at];
    let word_start = before
        .rfind(|c: char| c.is_whitespace() || c == '(' || c == '"')
        .map(|p| p + 1)
        .unwrap_or(0);
    let word = before[word_start..].to_lowercase();
    if abbreviations().contains(&word) {
        return true;
    }
    // "1." opening a numbered list item
    let marker = &word[..word.len() - 1];
    let line_prefix = before[..word_start].rsplit('\n').next().unwrap_or("");
    !marker.is_empty()
        && marker.len() <= 3
        && marker.chars().all(|c| c.is_ascii_digit())
        && line_prefix.trim().is_empty()
}

fn starts_list_item(line: &str) -> bool {
    let l = line.trim_start();
    let mut chars = l.chars();
    match chars.next() {
        Some('-' | '*' | '+') => chars.next().is_some_and(char::is_whitespace),
        Some('(') => {
            let inner: String = chars.by_ref().take_while(|&c| c != ')').collect();
            !inner.is_empty() && inner.len() <= 4 && inner.chars().all(|c| c.is_alphanumeric())
        }
        Some(c) if c.is_ascii_alphanumeric() => {
            let head: String = l.chars().take_while(|c| c.is_ascii_alphanumeric()).collect();
            let after = &l[head.len()..];
            let numbered = head.chars().all(|c| c.is_ascii_digit()) && head.len() <= 3;
            let lettered = head.len() == 1;
            (numbered && (after.starts_with(". ") || after.starts_with(") ")))
                || (lettered && after.starts_with(") "))
        }
        _ => false,
    }
}
