use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AttitudeError;
use crate::preprocess::normalize_tokens;
use crate::terms::Attitude;

const DEFAULT_CANNOT: &[&str] = &[
    "not", "without", "notwithstand", "refuse", "disallow", "decline", "against", "delete", "nor",
    "void", "neither", "prohibit", "remove", "don't", "no", "nothing",
];

const DEFAULT_MUST: &[&str] = &[
    "must", "should", "as long as", "so long as", "shall", "provided that", "ensure that",
    "ask that", "have to",
];

/// On-disk form: `{"cannot": [...], "must": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconFile {
    pub cannot: Vec<String>,
    pub must: Vec<String>,
}

/// Words and phrases that express CANNOT or MUST. Everything else reads as CAN.
///
/// Entries are stored as stem sequences so that "prohibited" matches
/// "prohibit" and "shall" matches "shall".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttitudeLexicon {
    cannot: BTreeSet<Vec<String>>,
    must: BTreeSet<Vec<String>>,
}

fn stems_of(entry: &str) -> Vec<String> {
    normalize_tokens(entry).into_iter().map(|t| t.stem).collect()
}

impl Default for AttitudeLexicon {
    fn default() -> Self {
        Self::from_lists(DEFAULT_CANNOT, DEFAULT_MUST).expect("default lexicon lists are disjoint")
    }
}

impl AttitudeLexicon {
    /// A lexicon with no entries; every PT then reads as CAN.
    pub fn empty() -> Self {
        AttitudeLexicon {
            cannot: BTreeSet::new(),
            must: BTreeSet::new(),
        }
    }

    pub fn from_lists<S: AsRef<str>>(cannot: &[S], must: &[S]) -> Result<Self, AttitudeError> {
        let cannot: BTreeSet<Vec<String>> = cannot
            .iter()
            .map(|e| stems_of(e.as_ref()))
            .filter(|s| !s.is_empty())
            .collect();
        let must: BTreeSet<Vec<String>> = must
            .iter()
            .map(|e| stems_of(e.as_ref()))
            .filter(|s| !s.is_empty())
            .collect();
        if let Some(shared) = cannot.intersection(&must).next() {
            return Err(AttitudeError::LexiconOverlap(shared.join(" ")));
        }
        Ok(AttitudeLexicon { cannot, must })
    }

    pub fn load(path: &Path) -> Result<Self, AttitudeError> {
        let raw = fs::read_to_string(path).map_err(|e| AttitudeError::Io(path.to_path_buf(), e))?;
        let file: LexiconFile = serde_json::from_str(&raw).map_err(AttitudeError::Json)?;
        Self::from_lists(&file.cannot, &file.must)
    }

    pub fn to_file(&self) -> LexiconFile {
        LexiconFile {
            cannot: self.cannot.iter().map(|s| s.join(" ")).collect(),
            must: self.must.iter().map(|s| s.join(" ")).collect(),
        }
    }

    /// Attitude of a single stem, if it is a one-word entry.
    pub fn single(&self, stem: &str) -> Option<Attitude> {
        let key = [stem.to_string()];
        if self.cannot.contains(key.as_slice()) {
            Some(Attitude::Cannot)
        } else if self.must.contains(key.as_slice()) {
            Some(Attitude::Must)
        } else {
            None
        }
    }

    /// Multiword entries, longest first.
    pub fn phrases(&self) -> Vec<(&[String], Attitude)> {
        let mut out: Vec<(&[String], Attitude)> = self
            .cannot
            .iter()
            .map(|p| (p.as_slice(), Attitude::Cannot))
            .chain(self.must.iter().map(|p| (p.as_slice(), Attitude::Must)))
            .filter(|(p, _)| p.len() > 1)
            .collect();
        out.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        out
    }

    /// Whether `stem` is a single-word entry or the first word of a phrase.
    pub fn cue(&self, stem: &str) -> Option<Attitude> {
        self.single(stem).or_else(|| {
            self.phrases()
                .into_iter()
                .find(|(p, _)| p[0] == stem && !matches!(stem, "as" | "so" | "have"))
                .map(|(_, a)| a)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.cannot.is_empty() && self.must.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_entries() {
        let lex = AttitudeLexicon::default();
        assert_eq!(lex.single("prohibit"), Some(Attitude::Cannot));
        assert_eq!(lex.single(&crate::preprocess::stem("prohibited")), Some(Attitude::Cannot));
        assert_eq!(lex.single("noth"), Some(Attitude::Cannot));
        assert_eq!(lex.single("don't"), Some(Attitude::Cannot));
        assert_eq!(lex.single("must"), Some(Attitude::Must));
        assert_eq!(lex.single("may"), None);
        let phrases = lex.phrases();
        assert_eq!(phrases.len(), 6);
        assert_eq!(phrases[0].0.len(), 3);
    }

    #[test]
    fn overlap_rejected() {
        assert!(AttitudeLexicon::from_lists(&["not"], &["Not"]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let lex = AttitudeLexicon::default();
        let f = lex.to_file();
        let again = AttitudeLexicon::from_lists(&f.cannot, &f.must).unwrap();
        assert_eq!(lex, again);
    }
}
