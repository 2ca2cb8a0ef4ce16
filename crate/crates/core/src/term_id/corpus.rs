use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::labels::{BioLabel, LabeledSentence};
use super::TermError;
use crate::preprocess::{normalize_tokens, Sentence};
use crate::terms::TermId;

/// Labeled sentences plus unlabeled ones for pseudo-labeling.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingCorpus {
    pub labeled: Vec<LabeledSentence>,
    pub unlabeled: Vec<Sentence>,
}

/// Parses the TSV training format: one `surface<TAB>label` line per token,
/// blank lines between sentences.
pub fn read_tsv(raw: &str) -> Result<Vec<LabeledSentence>, TermError> {
    let mut out = Vec::new();
    let mut surfaces: Vec<String> = Vec::new();
    let mut labels: Vec<BioLabel> = Vec::new();
    let mut first_line = 0;
    let flush = |surfaces: &mut Vec<String>, labels: &mut Vec<BioLabel>, out: &mut Vec<LabeledSentence>, line: usize| {
        if surfaces.is_empty() {
            return Ok(());
        }
        let sentence = Sentence::from_surfaces(surfaces, out.len());
        let ls = LabeledSentence::new(sentence, std::mem::take(labels)).map_err(|e| match e {
            TermError::InvalidTransition { position } => TermError::Malformed {
                line: line + position,
                reason: "I label does not continue an entity of the same term".into(),
            },
            other => other,
        })?;
        surfaces.clear();
        out.push(ls);
        Ok(())
    };
    for (i, line) in raw.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            flush(&mut surfaces, &mut labels, &mut out, first_line)?;
            continue;
        }
        let (surface, label) = line.split_once('\t').ok_or_else(|| TermError::Malformed {
            line: line_no,
            reason: "expected surface<TAB>label".into(),
        })?;
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return Err(TermError::Malformed {
                line: line_no,
                reason: "token surface must be non-empty and contain no whitespace".into(),
            });
        }
        let label: BioLabel = label.parse().map_err(|_| TermError::Malformed {
            line: line_no,
            reason: format!("unknown label {label:?}"),
        })?;
        if surfaces.is_empty() {
            first_line = line_no;
        }
        surfaces.push(surface.to_string());
        labels.push(label);
    }
    flush(&mut surfaces, &mut labels, &mut out, first_line)?;
    Ok(out)
}

pub fn write_tsv(sentences: &[LabeledSentence]) -> String {
    let mut out = String::new();
    for (i, s) in sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (t, l) in s.sentence.tokens.iter().zip(&s.labels) {
            let _ = writeln!(out, "{}\t{l}", t.surface);
        }
    }
    out
}

pub fn load_tsv(path: &Path) -> Result<Vec<LabeledSentence>, TermError> {
    let raw = fs::read_to_string(path).map_err(|e| TermError::Io(path.to_path_buf(), e))?;
    read_tsv(&raw)
}

/// Unlabeled sentences, one per non-blank line; `#` starts a comment line.
pub fn read_unlabeled(raw: &str) -> Vec<Sentence> {
    raw.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| Sentence::from_raw(l, i))
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parses the bracket annotation format used to author corpora:
/// `[[0|Redistribution and use]] are permitted .` marks the tokens inside
/// the brackets as an entity of term 0.
pub fn parse_bracketed(line: &str, index: usize) -> Result<LabeledSentence, TermError> {
    let bad = |reason: &str| TermError::Malformed {
        line: index + 1,
        reason: reason.to_string(),
    };
    let mut surfaces = Vec::new();
    let mut labels = Vec::new();
    let mut rest = line;
    while !rest.is_empty() {
        let (plain, tail) = match rest.find("[[") {
            Some(at) => (&rest[..at], Some(&rest[at + 2..])),
            None => (rest, None),
        };
        for t in normalize_tokens(plain) {
            surfaces.push(t.surface);
            labels.push(BioLabel::O);
        }
        let Some(tail) = tail else { break };
        let close = tail.find("]]").ok_or_else(|| bad("unclosed [["))?;
        let (head, body) = tail[..close].split_once('|').ok_or_else(|| bad("expected [[term|text]]"))?;
        let term = TermId::parse_loose(head.trim()).ok_or_else(|| bad("unknown term"))?;
        let toks = normalize_tokens(body);
        if toks.is_empty() {
            return Err(bad("empty entity"));
        }
        for (k, t) in toks.into_iter().enumerate() {
            surfaces.push(t.surface);
            labels.push(if k == 0 { BioLabel::B(term) } else { BioLabel::I(term) });
        }
        rest = &tail[close + 2..];
    }
    LabeledSentence::new(Sentence::from_surfaces(&surfaces, index), labels)
}

/// Reads a whole bracket-annotated corpus, one sentence per line. Blank
/// lines and `#` comment lines are skipped; errors report the file line.
pub fn read_bracketed(raw: &str) -> Result<Vec<LabeledSentence>, TermError> {
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut ls = parse_bracketed(line, i).map_err(|e| match e {
            TermError::Malformed { reason, .. } => TermError::Malformed { line: i + 1, reason },
            other => other,
        })?;
        ls.sentence.index = out.len();
        out.push(ls);
    }
    Ok(out)
}

/// Deterministic train/test split: shuffles with `seed`, then puts the first
/// `train_fraction` in the training part.
pub fn split<T: Clone>(items: &[T], train_fraction: f64, seed: u64) -> (Vec<T>, Vec<T>) {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = ((items.len() as f64) * train_fraction).round() as usize;
    let pick = |ids: &[usize]| ids.iter().map(|&i| items[i].clone()).collect();
    (pick(&idx[..cut]), pick(&idx[cut..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_round_trip() {
        let raw = "Do\tO\nNot\tO\nRedistribute\tB-0\n.\tO\n\nYou\tO\nmust\tO\ngive\tB-17\ncredit\tI-17\n";
        let s = read_tsv(raw).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].sentence.index, 1);
        assert_eq!(write_tsv(&s), raw);
    }

    #[test]
    fn malformed_lines_report_numbers() {
        let err = read_tsv("a\tO\nb O\n").unwrap_err();
        assert!(matches!(err, TermError::Malformed { line: 2, .. }), "{err:?}");
        let err = read_tsv("a\tO\n\nb\tX-1\n").unwrap_err();
        assert!(matches!(err, TermError::Malformed { line: 3, .. }));
        let err = read_tsv("x\tO\n\na\tO\nb\tI-3\n").unwrap_err();
        assert!(matches!(err, TermError::Malformed { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn bracketed() {
        let s = parse_bracketed("[[0|Redistribution and use]] are [[1|modified]] .", 0).unwrap();
        let l: Vec<String> = s.labels.iter().map(ToString::to_string).collect();
        assert_eq!(l, ["B-0", "I-0", "I-0", "O", "B-1", "O"]);
        assert!(parse_bracketed("[[0|x", 0).is_err());
        assert!(parse_bracketed("[[99|x]]", 0).is_err());
    }

    #[test]
    fn split_is_deterministic() {
        let items: Vec<u32> = (0..10).collect();
        let (a, b) = split(&items, 0.8, 3);
        assert_eq!((a.len(), b.len()), (8, 2));
        assert_eq!(split(&items, 0.8, 3), (a, b));
    }
}
