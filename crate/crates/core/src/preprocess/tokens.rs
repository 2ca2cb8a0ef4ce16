use serde::{Deserialize, Serialize};

/// One token of a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Lowercased root produced by [`stem`].
    pub stem: String,
    /// Index within the sentence.
    pub position: usize,
    /// Byte offset of `surface` within the tokenized string.
    #[serde(default)]
    pub offset: usize,
}

/// Splits `raw` into word and punctuation tokens and stems each one.
///
/// Words are maximal runs of alphanumerics. An apostrophe between letters stays
/// inside the word ("don't"), as does a period between digits ("2.0"). Every
/// other non-space character becomes its own token. Negative contractions are
/// split so that the negation is a separate token: "cannot" gives "can" +
/// "not", "doesn't" gives "does" + "n't".
pub fn normalize_tokens(raw: &str) -> Vec<Token> {
    let mut pieces: Vec<(usize, &str)> = Vec::new();
    let mut iter = raw.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c.is_whitespace() {
            continue;
        }
        if !c.is_alphanumeric() {
            pieces.push((i, &raw[i..i + c.len_utf8()]));
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, d)) = iter.peek() {
            let joins = if d.is_alphanumeric() {
                true
            } else if d == '\'' || d == '.' {
                let prev = raw[..j].chars().next_back();
                let next = raw[j + 1..].chars().next();
                match (prev, next) {
                    (Some(p), Some(n)) if d == '\'' => p.is_alphabetic() && n.is_alphabetic(),
                    (Some(p), Some(n)) => p.is_ascii_digit() && n.is_ascii_digit(),
                    _ => false,
                }
            } else {
                false
            };
            if !joins {
                break;
            }
            end = j + d.len_utf8();
            iter.next();
        }
        split_contraction(&raw[i..end], i, &mut pieces);
    }

    pieces
        .into_iter()
        .enumerate()
        .map(|(position, (offset, surface))| Token {
            surface: surface.to_string(),
            stem: stem_token(surface),
            position,
            offset,
        })
        .collect()
}

fn split_contraction<'a>(word: &'a str, at: usize, out: &mut Vec<(usize, &'a str)>) {
    let lower = word.to_ascii_lowercase();
    if lower == "cannot" {
        out.push((at, &word[..3]));
        out.push((at + 3, &word[3..]));
        return;
    }
    // "don't" is kept whole; it is an entry of the attitude lexicon.
    if lower.len() > 3 && lower.ends_with("n't") && lower != "don't" {
        let cut = word.len() - 3;
        out.push((at, &word[..cut]));
        out.push((at + cut, &word[cut..]));
        return;
    }
    out.push((at, word));
}

fn stem_token(surface: &str) -> String {
    let lower = surface.to_lowercase();
    match lower.as_str() {
        "n't" => "not".to_string(),
        "ca" => "can".to_string(),
        "wo" => "will".to_string(),
        _ if lower.chars().all(|c| c.is_alphabetic() || c == '\'') => stem(&lower),
        _ => lower,
    }
}

/// Function words that the suffix rules would mangle.
const STEM_EXCEPTIONS: &[&str] = &[
    "does", "this", "thus", "has", "was", "is", "its", "his", "hers", "ours", "yours", "theirs",
    "less", "unless", "always", "perhaps", "whereas", "as", "us", "yes", "various", "news",
    "means", "series", "species", "during", "thing", "nothing", "anything", "something",
    "everything", "being", "king", "bring", "string", "sing", "ring", "wing", "spring",
    "notwithstanding", "shall", "should", "needed", "need", "uses",
];

/// Lowercasing suffix-stripping stemmer.
///
/// The rule set is small and fixed so that golden outputs stay stable. It maps
/// inflected and derived forms of the same verb onto one root, e.g.
/// redistribute / redistributed / redistribution / redistributions all give
/// "redistribut".
pub fn stem(word: &str) -> String {
    let w = word.to_lowercase();
    if w.chars().count() <= 3 {
        return w;
    }
    if STEM_EXCEPTIONS.contains(&w.as_str()) {
        return match w.as_str() {
            "nothing" => "noth".into(),
            "notwithstanding" => "notwithstand".into(),
            "needed" => "need".into(),
            "uses" => "use".into(),
            _ => w,
        };
    }

    if let Some(base) = w.strip_suffix("ies").or_else(|| w.strip_suffix("ied")) {
        if base.len() >= 3 {
            return format!("{base}y");
        }
    }
    if let Some(base) = w.strip_suffix("sses") {
        return format!("{base}ss");
    }
    for suffix in ["ations", "ation", "ions", "ion"] {
        if let Some(base) = w.strip_suffix(suffix) {
            if base.len() >= 4 {
                return base.to_string();
            }
        }
    }
    for suffix in ["ingly", "ings", "ing", "edly", "ed"] {
        if let Some(base) = w.strip_suffix(suffix) {
            if base.len() >= 3 && base.chars().any(is_vowel) {
                return undouble(base);
            }
            if base == "us" {
                return "use".into();
            }
        }
    }
    if let Some(base) = w.strip_suffix("ly") {
        if base.len() >= 4 {
            return base.to_string();
        }
    }
    if let Some(base) = w.strip_suffix('s') {
        let keep = base.ends_with('s') || base.ends_with('u') || base.ends_with('i');
        if !keep && base.len() >= 3 {
            return strip_final_e(base);
        }
    }
    strip_final_e(&w)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn strip_final_e(w: &str) -> String {
    if w.len() >= 5 && w.ends_with('e') && !w.ends_with("ee") {
        w[..w.len() - 1].to_string()
    } else {
        w.to_string()
    }
}

fn undouble(base: &str) -> String {
    let b = base.as_bytes();
    let n = b.len();
    if n >= 4 && b[n - 1] == b[n - 2] && !matches!(b[n - 1], b'l' | b's' | b'z') && !is_vowel(b[n - 1] as char) {
        base[..n - 1].to_string()
    } else {
        base.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stems(s: &str) -> Vec<String> {
        normalize_tokens(s).into_iter().map(|t| t.stem).collect()
    }

    #[test]
    fn golden_stems() {
        assert_eq!(stems("Redistribution and use"), ["redistribut", "and", "use"]);
        assert_eq!(stems("MUST-HAVE"), ["must", "-", "have"]);
        assert!(stems("").is_empty());
        for w in ["redistribute", "redistributed", "redistributions", "redistributing"] {
            assert_eq!(stem(w), "redistribut", "{w}");
        }
        assert_eq!(stem("permitted"), stem("permit"));
        assert_eq!(stem("prohibited"), "prohibit");
        assert_eq!(stem("removed"), stem("remove"));
        assert_eq!(stem("refused"), stem("refuse"));
        assert_eq!(stem("declined"), stem("decline"));
        assert_eq!(stem("deleted"), stem("delete"));
        assert_eq!(stem("used"), "use");
        assert_eq!(stem("using"), "use");
        assert_eq!(stem("copies"), "copy");
        assert_eq!(stem("modified"), "modify");
        assert_eq!(stem("licenses"), stem("license"));
        assert_eq!(stem("changes"), stem("change"));
        assert_eq!(stem("installed"), "install");
        assert_eq!(stem("notwithstanding"), "notwithstand");
    }

    #[test]
    fn surfaces_and_positions() {
        let toks = normalize_tokens("You can't, cannot or don't use v2.0 (see).");
        let surf: Vec<_> = toks.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(
            surf,
            ["You", "ca", "n't", ",", "can", "not", "or", "don't", "use", "v2.0", "(", "see", ")", "."]
        );
        let st: Vec<_> = toks.iter().map(|t| t.stem.as_str()).collect();
        assert_eq!(&st[1..3], ["can", "not"]);
        for (i, t) in toks.iter().enumerate() {
            assert_eq!(t.position, i);
        }
    }

    #[test]
    fn offsets_point_at_surfaces() {
        let raw = "Do  not   redistribute-it.";
        for t in normalize_tokens(raw) {
            assert_eq!(&raw[t.offset..t.offset + t.surface.len()], t.surface);
        }
    }

    #[test]
    fn idempotent_on_normalized_text() {
        let raw = "Redistributions of source code must retain the above copyright notice .";
        let once = normalize_tokens(raw);
        let joined = once.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
        let twice = normalize_tokens(&joined);
        assert_eq!(
            once.iter().map(|t| (&t.surface, &t.stem)).collect::<Vec<_>>(),
            twice.iter().map(|t| (&t.surface, &t.stem)).collect::<Vec<_>>()
        );
    }
}
