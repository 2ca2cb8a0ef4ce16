use unicode_normalization::UnicodeNormalization;

/// NFC-normalizes `text` and folds typographic punctuation to ASCII.
///
/// This is the only "spell checking" the pipeline does: it is deterministic and
/// never rewrites words.
pub fn normalize_text(text: &str) -> String {
    text.replace("\r\n", "\n").nfc().filter_map(fold_char).collect()
}

fn fold_char(c: char) -> Option<char> {
    Some(match c {
        '\u{2018}' | '\u{2019}' | '\u{201A}' | '\u{201B}' | '\u{2032}' | '`' => '\'',
        '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' | '\u{2033}' => '"',
        '\u{2010}'..='\u{2015}' | '\u{2212}' => '-',
        '\u{00A0}' | '\u{2000}'..='\u{200A}' | '\u{202F}' | '\u{3000}' => ' ',
        '\u{2022}' | '\u{25CF}' | '\u{00B7}' => '*',
        '\u{00A9}' => return Some('c'),
        '\u{FEFF}' | '\u{200B}'..='\u{200D}' => return None,
        '\r' => '\n',
        c if c.is_control() && c != '\n' && c != '\t' => return None,
        c => c,
    })
}

/// Collapses all whitespace runs to a single space and trims.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Comparison form of a text plus a map back to byte offsets of the source.
#[derive(Debug, Clone)]
pub(crate) struct Folded {
    pub text: String,
    /// For every char of `text`, the source byte range it was produced from.
    pub spans: Vec<(usize, usize)>,
}

/// Builds the comparison form used for official-license matching: case-folded,
/// whitespace-collapsed, digit runs replaced by `0`, and copyright-holder lines
/// replaced by a single placeholder.
pub(crate) fn fold_for_match(source: &str, is_title: impl Fn(&str) -> bool) -> Folded {
    let mut out = Folded {
        text: String::new(),
        spans: Vec::new(),
    };
    let mut pending_space: Option<(usize, usize)> = None;
    let mut first_content_line = true;

    let mut offset = 0;
    for line in source.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let trimmed = line.trim();
        if trimmed.is_empty() {
            if !out.text.is_empty() && pending_space.is_none() {
                pending_space = Some((line_start, line_start + line.len()));
            }
            continue;
        }
        let line_end = line_start + line.trim_end().len();
        let was_first = std::mem::replace(&mut first_content_line, false);
        if was_first && is_title(trimmed) {
            continue;
        }
        if is_masked_line(trimmed) {
            if out.text.ends_with("<copyright>") {
                if let Some(last) = out.spans.last_mut() {
                    last.1 = line_end;
                }
                continue;
            }
            push_sep(&mut out, &mut pending_space);
            for c in "<copyright>".chars() {
                out.text.push(c);
                out.spans.push((line_start, line_end));
            }
            pending_space = Some((line_end, line_end));
            continue;
        }

        let mut in_digits = false;
        for (i, c) in line.char_indices() {
            let at = line_start + i;
            let next = at + c.len_utf8();
            if c.is_whitespace() {
                in_digits = false;
                if !out.text.is_empty() && pending_space.is_none() {
                    pending_space = Some((at, next));
                }
                continue;
            }
            push_sep(&mut out, &mut pending_space);
            if c.is_ascii_digit() {
                if in_digits {
                    if let Some(last) = out.spans.last_mut() {
                        last.1 = next;
                    }
                    continue;
                }
                in_digits = true;
                out.text.push('0');
                out.spans.push((at, next));
                continue;
            }
            in_digits = false;
            for lc in c.to_lowercase() {
                out.text.push(lc);
                out.spans.push((at, next));
            }
        }
    }
    out
}

fn push_sep(out: &mut Folded, pending: &mut Option<(usize, usize)>) {
    if let Some(span) = pending.take() {
        if !out.text.is_empty() {
            out.text.push(' ');
            out.spans.push(span);
        }
    }
}

/// Copyright-holder lines carry per-project names and years.
pub(crate) fn is_masked_line(trimmed: &str) -> bool {
    let lower = trimmed.to_lowercase();
    if lower == "all rights reserved." || lower == "all rights reserved" {
        return true;
    }
    let Some(rest) = lower.strip_prefix("copyright") else {
        return false;
    };
    let rest = rest.trim_start();
    rest.starts_with("(c)")
        || rest.starts_with('\u{a9}')
        || rest.starts_with('<')
        || rest.starts_with('[')
        || rest.starts_with('{')
        || rest.chars().next().is_some_and(|c| c.is_ascii_digit())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_quotes_and_dashes() {
        assert_eq!(
            normalize_text("\u{201C}Software\u{201D} \u{2014} it\u{2019}s"),
            "\"Software\" - it's"
        );
    }

    #[test]
    fn fold_for_match_masks_copyright_and_digits() {
        let f = fold_for_match("Copyright (c) 2021 Jane\n\nUse  it 1999 TIMES.\n", |_| false);
        assert_eq!(f.text, "<copyright> use it 0 times.");
        assert_eq!(f.text.chars().count(), f.spans.len());
        let src = "Copyright (c) 2021 Jane\n\nUse  it 1999 TIMES.\n";
        let idx = f.text.find('0').unwrap();
        let char_idx = f.text[..idx].chars().count();
        let (a, b) = f.spans[char_idx];
        assert_eq!(&src[a..b], "1999");
    }

    #[test]
    fn title_line_only_masked_when_first() {
        let f = fold_for_match("MIT License\nbody MIT License", |l| l == "MIT License");
        assert_eq!(f.text, "body mit license");
        let f = fold_for_match("Copyright (c) 1 A\nCopyright (c) 2 B\nx", |_| false);
        assert_eq!(f.text, "<copyright> x");
    }
}
