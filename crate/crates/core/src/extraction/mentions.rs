use crate::license::{LicenseInstance, Origin};
use crate::registry::{resolve_reference_at, SpdxDb};

const UNDER_VERBS: &[&str] = &["licensed", "licenced", "released", "distributed", "available"];
const MAX_NAME_WORDS: usize = 8;

/// Short strings on `line` that may name a license: the value of an SPDX
/// identifier tag or a `License:` field, URLs, and the words after
/// "licensed under".
pub fn mention_candidates(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let lower = line.to_ascii_lowercase();
    if let Some(at) = lower.find("spdx-license-identifier:") {
        let rest = line[at + "spdx-license-identifier:".len()..].trim();
        let rest = rest.trim_end_matches("*/").trim_end_matches("-->").trim();
        if !rest.is_empty() {
            out.push(rest.to_string());
        }
    }
    let stripped = lower.trim_start_matches(['#', '*', '-', '/', ' ']);
    let offset = lower.len() - stripped.len();
    for tag in ["license:", "licence:"] {
        if stripped.starts_with(tag) {
            let rest = line[offset + tag.len()..].trim();
            if !rest.is_empty() {
                out.push(rest.to_string());
            }
        }
    }
    for tok in line.split(|c: char| c.is_whitespace() || "()[]<>\"'".contains(c)) {
        let t = tok.trim_end_matches(['.', ',', ';', ':']);
        let tl = t.to_ascii_lowercase();
        if tl.starts_with("http://") || tl.starts_with("https://") || tl.starts_with("www.") {
            out.push(t.to_string());
        }
    }
    let words: Vec<&str> = line.split_whitespace().collect();
    for (i, w) in words.iter().enumerate() {
        let w = w.to_ascii_lowercase();
        if !UNDER_VERBS.contains(&w.as_str()) || words.get(i + 1).map(|u| u.to_ascii_lowercase()) != Some("under".into()) {
            continue;
        }
        let tail = &words[i + 2..words.len().min(i + 2 + MAX_NAME_WORDS)];
        for n in (1..=tail.len()).rev() {
            let phrase = tail[..n].join(" ");
            let phrase = phrase.trim_end_matches(|c: char| c.is_ascii_punctuation() && c != '+' && c != ')');
            let phrase = phrase.trim_start_matches("the ").trim_start_matches("The ");
            if !phrase.is_empty() {
                out.push(phrase.to_string());
            }
        }
    }
    out
}

/// Licenses that `text` names. Each line yields at most one instance: the
/// first candidate the registry recognizes.
pub fn find_references(text: &str, origin: &Origin, db: &SpdxDb) -> Vec<LicenseInstance> {
    let mut out: Vec<LicenseInstance> = Vec::new();
    for line in text.lines() {
        let found = mention_candidates(line)
            .iter()
            .find_map(|c| resolve_reference_at(c, db, Some(origin.clone())));
        if let Some(inst) = found {
            if !out.iter().any(|o| o.spdx_id == inst.spdx_id) {
                out.push(inst);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates() {
        let c = mention_candidates("// SPDX-License-Identifier: MIT");
        assert_eq!(c, ["MIT"]);
        let c = mention_candidates("See <https://opensource.org/licenses/MIT>.");
        assert_eq!(c, ["https://opensource.org/licenses/MIT"]);
        let c = mention_candidates("This project is licensed under the Apache License 2.0.");
        assert!(c.contains(&"Apache License 2.0".to_string()));
    }

    #[test]
    fn references_resolve() {
        let db = SpdxDb::builtin();
        let o = Origin::path("README.md");
        let found = find_references("# Tool\n\nReleased under the MIT License.\n\nLicense: MIT\n", &o, db);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].spdx_id.as_deref(), Some("MIT"));
        assert_eq!(found[0].origin, o);
        assert!(find_references("Nothing to see here.\n", &o, db).is_empty());
    }
}
