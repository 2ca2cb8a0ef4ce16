use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TermError;
use crate::preprocess::Sentence;
use crate::terms::{TermId, TERM_COUNT};

/// Size of the label alphabet: O, 23 B labels and 23 I labels.
pub const LABEL_COUNT: usize = 1 + 2 * TERM_COUNT;

/// A BIO tag. Indices follow the alphabet order O, B-0..B-22, I-0..I-22.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BioLabel {
    O,
    B(TermId),
    I(TermId),
}

impl BioLabel {
    pub fn index(self) -> usize {
        match self {
            BioLabel::O => 0,
            BioLabel::B(t) => 1 + t.index(),
            BioLabel::I(t) => 1 + TERM_COUNT + t.index(),
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(BioLabel::O),
            i if i <= TERM_COUNT => TermId::new((i - 1) as u8).map(BioLabel::B),
            i if i < LABEL_COUNT => TermId::new((i - 1 - TERM_COUNT) as u8).map(BioLabel::I),
            _ => None,
        }
    }

    /// All labels in alphabet order.
    pub fn alphabet() -> impl Iterator<Item = BioLabel> {
        (0..LABEL_COUNT).map(|i| BioLabel::from_index(i).expect("index in range"))
    }

    pub fn term(self) -> Option<TermId> {
        match self {
            BioLabel::O => None,
            BioLabel::B(t) | BioLabel::I(t) => Some(t),
        }
    }

    /// Whether `self` may directly follow `prev` (`None` = sentence start).
    pub fn may_follow(self, prev: Option<BioLabel>) -> bool {
        match self {
            BioLabel::I(t) => matches!(prev, Some(BioLabel::B(s) | BioLabel::I(s)) if s == t),
            _ => true,
        }
    }
}

impl fmt::Display for BioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioLabel::O => f.write_str("O"),
            BioLabel::B(t) => write!(f, "B-{}", t.index()),
            BioLabel::I(t) => write!(f, "I-{}", t.index()),
        }
    }
}

impl FromStr for BioLabel {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TermError::BadLabel(s.to_string());
        if s == "O" {
            return Ok(BioLabel::O);
        }
        let (kind, num) = s.split_once('-').ok_or_else(bad)?;
        if num.is_empty() || (num.len() > 1 && num.starts_with('0')) {
            return Err(bad());
        }
        let t = num.parse::<u8>().ok().and_then(TermId::new).ok_or_else(bad)?;
        match kind {
            "B" => Ok(BioLabel::B(t)),
            "I" => Ok(BioLabel::I(t)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for BioLabel {
    type Error = TermError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<BioLabel> for String {
    fn from(l: BioLabel) -> String {
        l.to_string()
    }
}

/// True when every I label continues an entity of the same term.
pub fn is_valid_sequence(labels: &[BioLabel]) -> bool {
    let mut prev = None;
    for &l in labels {
        if !l.may_follow(prev) {
            return false;
        }
        prev = Some(l);
    }
    true
}

/// A sentence with one gold label per token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub sentence: Sentence,
    pub labels: Vec<BioLabel>,
}

impl LabeledSentence {
    pub fn new(sentence: Sentence, labels: Vec<BioLabel>) -> Result<Self, TermError> {
        if sentence.len() != labels.len() {
            return Err(TermError::LengthMismatch {
                tokens: sentence.len(),
                labels: labels.len(),
            });
        }
        if let Some(at) = first_invalid(&labels) {
            return Err(TermError::InvalidTransition { position: at });
        }
        Ok(LabeledSentence { sentence, labels })
    }

    pub fn entities(&self) -> Vec<TermEntity> {
        decode_entities(&self.labels, &self.sentence).expect("validated on construction")
    }
}

fn first_invalid(labels: &[BioLabel]) -> Option<usize> {
    let mut prev = None;
    for (i, &l) in labels.iter().enumerate() {
        if !l.may_follow(prev) {
            return Some(i);
        }
        prev = Some(l);
    }
    None
}

/// A span of tokens `[start, end)` realizing one license term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TermEntity {
    pub term: TermId,
    pub start: usize,
    pub end: usize,
    pub sentence_index: usize,
}

impl TermEntity {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, token: usize) -> bool {
        (self.start..self.end).contains(&token)
    }
}

/// Labels for `len` tokens with the given non-overlapping entities.
pub fn encode_labels(entities: &[TermEntity], len: usize) -> Result<Vec<BioLabel>, TermError> {
    let mut labels = vec![BioLabel::O; len];
    for e in entities {
        if e.is_empty() || e.end > len {
            return Err(TermError::SpanOutOfRange { start: e.start, end: e.end, len });
        }
        if labels[e.start..e.end].iter().any(|l| *l != BioLabel::O) {
            return Err(TermError::OverlappingEntities);
        }
        labels[e.start] = BioLabel::B(e.term);
        for l in &mut labels[e.start + 1..e.end] {
            *l = BioLabel::I(e.term);
        }
    }
    Ok(labels)
}

/// Entities in a label sequence: each B(t) I(t)* run gives one entity.
pub fn decode_entities(labels: &[BioLabel], sentence: &Sentence) -> Result<Vec<TermEntity>, TermError> {
    decode_entities_reporting(labels, sentence).map(|(e, _)| e)
}

/// Like [`decode_entities`], also returning a warning for every I label that
/// did not continue an entity of its term and was read as B instead.
pub fn decode_entities_reporting(
    labels: &[BioLabel],
    sentence: &Sentence,
) -> Result<(Vec<TermEntity>, Vec<String>), TermError> {
    if labels.len() != sentence.len() {
        return Err(TermError::LengthMismatch {
            tokens: sentence.len(),
            labels: labels.len(),
        });
    }
    let mut entities: Vec<TermEntity> = Vec::new();
    let mut warnings = Vec::new();
    let mut open: Option<TermEntity> = None;
    let mut prev = None;
    for (i, &l) in labels.iter().enumerate() {
        let starts = match l {
            BioLabel::O => None,
            BioLabel::B(t) => Some(t),
            BioLabel::I(_) if l.may_follow(prev) => {
                if let Some(e) = open.as_mut() {
                    e.end = i + 1;
                }
                None
            }
            BioLabel::I(t) => {
                warnings.push(format!(
                    "sentence {}: dangling {l} at token {i} read as B-{}",
                    sentence.index,
                    t.index()
                ));
                Some(t)
            }
        };
        if l == BioLabel::O || starts.is_some() {
            entities.extend(open.take());
        }
        if let Some(term) = starts {
            open = Some(TermEntity {
                term,
                start: i,
                end: i + 1,
                sentence_index: sentence.index,
            });
            // a coerced I now continues like a B
            prev = Some(BioLabel::B(term));
            continue;
        }
        prev = Some(l);
    }
    entities.extend(open);
    Ok((entities, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: u8) -> TermId {
        TermId::new(i).unwrap()
    }

    #[test]
    fn alphabet_order_and_round_trip() {
        let all: Vec<_> = BioLabel::alphabet().collect();
        assert_eq!(all.len(), 47);
        assert_eq!(all[0], BioLabel::O);
        assert_eq!(all[1], BioLabel::B(t(0)));
        assert_eq!(all[24], BioLabel::I(t(0)));
        for (i, l) in all.iter().enumerate() {
            assert_eq!(l.index(), i);
            assert_eq!(l.to_string().parse::<BioLabel>().unwrap(), *l);
        }
        for bad in ["B-23", "I-", "X-1", "B-01", "o", "B0"] {
            assert!(bad.parse::<BioLabel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn decode_examples() {
        let s = Sentence::from_surfaces(&["a", "b", "c"], 0);
        let e = decode_entities(&[BioLabel::B(t(0)), BioLabel::I(t(0)), BioLabel::O], &s).unwrap();
        assert_eq!(e, [TermEntity { term: t(0), start: 0, end: 2, sentence_index: 0 }]);
        assert!(decode_entities(&[BioLabel::O; 3], &s).unwrap().is_empty());
        assert!(matches!(decode_entities(&[BioLabel::O; 2], &s), Err(TermError::LengthMismatch { .. })));
    }

    #[test]
    fn adjacent_entities_and_dangling_i() {
        let s = Sentence::from_surfaces(&["a", "b", "c", "d"], 3);
        let labels = [BioLabel::B(t(1)), BioLabel::B(t(1)), BioLabel::I(t(2)), BioLabel::I(t(2))];
        let (e, w) = decode_entities_reporting(&labels, &s).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!((e[2].term, e[2].start, e[2].end), (t(2), 2, 4));
        assert_eq!(w.len(), 1);
        assert!(!is_valid_sequence(&labels));
    }

    #[test]
    fn labeled_sentence_validity() {
        let s = Sentence::from_surfaces(&["a", "b"], 0);
        assert!(LabeledSentence::new(s.clone(), vec![BioLabel::O, BioLabel::I(t(0))]).is_err());
        assert!(LabeledSentence::new(s.clone(), vec![BioLabel::O]).is_err());
        assert!(LabeledSentence::new(s, vec![BioLabel::B(t(4)), BioLabel::I(t(4))]).is_ok());
    }
}
