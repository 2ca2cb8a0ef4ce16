use serde::{Deserialize, Serialize};

use super::text::{fold_for_match, normalize_text};
use crate::registry::SpdxDb;

/// Minimum share of an official text that must appear verbatim (after
/// folding) for a license to count as containing it.
pub const CONTAINS_THRESHOLD: f64 = 0.95;

/// Outcome of comparing a license text against the official texts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchResult {
    ExactOfficial { spdx_id: String },
    ContainsOfficial { spdx_id: String, residual: String },
    NoMatch,
}

impl MatchResult {
    pub fn spdx_id(&self) -> Option<&str> {
        match self {
            MatchResult::ExactOfficial { spdx_id } | MatchResult::ContainsOfficial { spdx_id, .. } => {
                Some(spdx_id)
            }
            MatchResult::NoMatch => None,
        }
    }

    /// Text left to interpret after removing the official part.
    pub fn residual<'a>(&'a self, original: &'a str) -> &'a str {
        match self {
            MatchResult::ExactOfficial { .. } => "",
            MatchResult::ContainsOfficial { residual, .. } => residual,
            MatchResult::NoMatch => original,
        }
    }
}

struct Candidate<'a> {
    id: &'a str,
    /// Matched char range in the folded input.
    start: usize,
    end: usize,
    coverage: f64,
    canonical_len: usize,
}

/// Compares `text` with every official text in `db`.
///
/// Both sides are folded (case, whitespace, digit runs, copyright lines, a
/// leading title). Equal folded forms give `ExactOfficial`. Otherwise, if a
/// contiguous run of the input equals a run of some official text at least
/// [`CONTAINS_THRESHOLD`] of that text long, the result is `ContainsOfficial`
/// and the residual is the input with the matched span cut out.
pub fn match_official(text: &str, db: &SpdxDb) -> MatchResult {
    let normalized = normalize_text(text);
    let input = fold_for_match(&normalized, |l| db.is_title(l));
    if input.text.is_empty() {
        return MatchResult::NoMatch;
    }
    for e in db.entries() {
        if db.folded(&e.id) == Some(input.text.as_str()) {
            return MatchResult::ExactOfficial { spdx_id: e.id.clone() };
        }
    }

    let in_chars: Vec<char> = input.text.chars().collect();
    let mut best: Option<Candidate> = None;
    for e in db.entries() {
        let Some(canon) = db.folded(&e.id) else { continue };
        if let Some(c) = best_containment(&in_chars, &input.text, canon, &e.id) {
            let better = match &best {
                None => true,
                Some(b) => {
                    c.coverage > b.coverage || (c.coverage == b.coverage && c.canonical_len > b.canonical_len)
                }
            };
            if better {
                best = Some(c);
            }
        }
    }
    let Some(best) = best else {
        return MatchResult::NoMatch;
    };

    let from = input.spans[best.start].0;
    let to = input.spans[best.end - 1].1;
    let before = normalized[..from].trim();
    let before = if db.is_title(before) { "" } else { before };
    let after = normalized[to..].trim();
    let residual = match (before.is_empty(), after.is_empty()) {
        (true, _) => after.to_string(),
        (false, true) => before.to_string(),
        (false, false) => format!("{before}\n\n{after}"),
    };
    if residual.is_empty() {
        // only title or notice lines differed
        return MatchResult::ExactOfficial {
            spdx_id: best.id.to_string(),
        };
    }
    MatchResult::ContainsOfficial {
        spdx_id: best.id.to_string(),
        residual,
    }
}

/// Longest verbatim overlap of `canon` inside the input, if it reaches the
/// threshold.
///
/// Any run covering at least 95% of `canon` must contain its middle 90%, so
/// it suffices to locate that middle segment and extend each hit outward.
fn best_containment<'a>(in_chars: &[char], input: &str, canon: &str, id: &'a str) -> Option<Candidate<'a>> {
    let c_chars: Vec<char> = canon.chars().collect();
    let n = c_chars.len();
    if n == 0 || in_chars.len() < (n as f64 * CONTAINS_THRESHOLD).ceil() as usize {
        return None;
    }
    let lo = n / 20;
    let hi = n - n / 20;
    let middle: String = c_chars[lo..hi].iter().collect();

    let mut best: Option<Candidate> = None;
    let mut search_from = 0;
    while let Some(rel) = input[search_from..].find(&middle) {
        let byte_at = search_from + rel;
        let at = input[..byte_at].chars().count();
        let (mut s_in, mut s_c) = (at, lo);
        while s_in > 0 && s_c > 0 && in_chars[s_in - 1] == c_chars[s_c - 1] {
            s_in -= 1;
            s_c -= 1;
        }
        let (mut e_in, mut e_c) = (at + (hi - lo), hi);
        while e_in < in_chars.len() && e_c < n && in_chars[e_in] == c_chars[e_c] {
            e_in += 1;
            e_c += 1;
        }
        let coverage = (e_c - s_c) as f64 / n as f64;
        if coverage >= CONTAINS_THRESHOLD && best.as_ref().is_none_or(|b| coverage > b.coverage) {
            best = Some(Candidate {
                id,
                start: s_in,
                end: e_in,
                coverage,
                canonical_len: n,
            });
        }
        search_from = byte_at + input[byte_at..].chars().next().map_or(1, char::len_utf8);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mit() -> String {
        SpdxDb::builtin().get("MIT").unwrap().canonical_text.clone()
    }

    #[test]
    fn every_canonical_text_is_exact() {
        let db = SpdxDb::builtin();
        for e in db.entries() {
            assert_eq!(
                match_official(&e.canonical_text, db),
                MatchResult::ExactOfficial { spdx_id: e.id.clone() },
                "{}",
                e.id
            );
        }
    }

    #[test]
    fn filled_template_still_exact() {
        let text = mit().replace("<year>", "2019").replace("<copyright holders>", "Jane Roe");
        let text = format!("MIT License\n\n{text}");
        assert_eq!(match_official(&text, SpdxDb::builtin()).spdx_id(), Some("MIT"));
        assert!(matches!(match_official(&text, SpdxDb::builtin()), MatchResult::ExactOfficial { .. }));
    }

    #[test]
    fn appended_clause_is_residual() {
        let text = format!("{}\n\nYou must email the author yearly.", mit());
        assert_eq!(
            match_official(&text, SpdxDb::builtin()),
            MatchResult::ContainsOfficial {
                spdx_id: "MIT".into(),
                residual: "You must email the author yearly.".into()
            }
        );
    }

    #[test]
    fn custom_text_is_no_match() {
        let db = SpdxDb::builtin();
        assert_eq!(match_official("Do Not Redistribute.", db), MatchResult::NoMatch);
        assert_eq!(match_official("", db), MatchResult::NoMatch);
    }
}
