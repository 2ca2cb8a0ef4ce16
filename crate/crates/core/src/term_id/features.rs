use std::sync::OnceLock;

use super::TermError;
use crate::attitude::AttitudeLexicon;
use crate::preprocess::Sentence;
use crate::terms::Attitude;

/// Identifies the feature template; stored in model files.
pub const TEMPLATE_VERSION: &str = "window2-shape-lex-bigram/1";

const BOS: &str = "<s>";
const EOS: &str = "</s>";
const WINDOW: isize = 2;

fn lexicon() -> &'static AttitudeLexicon {
    static LEX: OnceLock<AttitudeLexicon> = OnceLock::new();
    LEX.get_or_init(AttitudeLexicon::default)
}

/// Coarse orthographic class of a surface form.
pub fn shape(surface: &str) -> &'static str {
    let mut chars = surface.chars();
    let Some(first) = chars.next() else {
        return "empty";
    };
    if surface.chars().all(|c| c.is_ascii_digit() || c == '.') {
        "digit"
    } else if !surface.chars().any(char::is_alphanumeric) {
        "punct"
    } else if surface.chars().all(|c| c.is_lowercase() || c == '\'') {
        "word"
    } else if first.is_uppercase() && chars.all(|c| c.is_lowercase() || c == '\'') {
        "cap"
    } else if surface.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase) {
        "upper"
    } else {
        "mixed"
    }
}

fn position_bucket(position: usize) -> &'static str {
    match position {
        0 => "0",
        1 => "1",
        2 => "2",
        3..=5 => "3-5",
        6..=10 => "6-10",
        _ => "11+",
    }
}

fn stem_at(sentence: &Sentence, i: isize) -> &str {
    if i < 0 {
        BOS
    } else {
        sentence.tokens.get(i as usize).map_or(EOS, |t| t.stem.as_str())
    }
}

/// Features of the token at `position`.
///
/// The template reads stems in a window of two tokens each side (with
/// boundary markers past the ends), the token's shape, a position bucket,
/// attitude-lexicon cues in the window, and the stem bigrams touching the
/// token.
pub fn featurize(sentence: &Sentence, position: usize) -> Result<Vec<String>, TermError> {
    if position >= sentence.len() {
        return Err(TermError::PositionOutOfRange {
            position,
            len: sentence.len(),
        });
    }
    let p = position as isize;
    let mut f = Vec::with_capacity(16);
    f.push("bias".to_string());
    for d in -WINDOW..=WINDOW {
        f.push(format!("stem[{d:+}]={}", stem_at(sentence, p + d)).replace("[+0]", "[0]"));
    }
    f.push(format!("shape={}", shape(&sentence.tokens[position].surface)));
    f.push(format!("posb={}", position_bucket(position)));

    let lex = lexicon();
    if let Some(a) = lex.cue(&sentence.tokens[position].stem) {
        f.push(format!("lex[0]={}", cue_name(a)));
    }
    let mut seen = [false; 2];
    for d in -WINDOW..=WINDOW {
        let i = p + d;
        if d == 0 || i < 0 || i as usize >= sentence.len() {
            continue;
        }
        if let Some(a) = lex.cue(&sentence.tokens[i as usize].stem) {
            let k = usize::from(a == Attitude::Must);
            if !seen[k] {
                seen[k] = true;
                f.push(format!("lex[win]={}", cue_name(a)));
            }
        }
    }
    f.push(format!("bi[-1]={}|{}", stem_at(sentence, p - 1), stem_at(sentence, p)));
    f.push(format!("bi[+1]={}|{}", stem_at(sentence, p), stem_at(sentence, p + 1)));
    Ok(f)
}

fn cue_name(a: Attitude) -> &'static str {
    match a {
        Attitude::Must => "must",
        _ => "cannot",
    }
}

/// Features for every token of a sentence.
pub fn featurize_sentence(sentence: &Sentence) -> Vec<Vec<String>> {
    (0..sentence.len())
        .map(|i| featurize(sentence, i).expect("position in range"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_readout() {
        let s = Sentence::from_raw("redistribution and use", 0);
        let f = featurize(&s, 0).unwrap();
        for want in ["stem[0]=redistribut", "shape=word", "stem[+1]=and", "stem[-1]=<s>", "posb=0"] {
            assert!(f.iter().any(|x| x == want), "{want} missing from {f:?}");
        }
    }

    #[test]
    fn boundaries_and_errors() {
        let s = Sentence::from_raw("Permitted", 0);
        let f = featurize(&s, 0).unwrap();
        assert!(f.contains(&"stem[-2]=<s>".to_string()));
        assert!(f.contains(&"stem[+2]=</s>".to_string()));
        assert!(f.contains(&"shape=cap".to_string()));
        assert!(matches!(featurize(&s, 1), Err(TermError::PositionOutOfRange { .. })));
    }

    #[test]
    fn lexicon_cues() {
        let s = Sentence::from_raw("you must not sell", 0);
        let f = featurize(&s, 3).unwrap();
        assert!(f.contains(&"lex[win]=cannot".to_string()));
        assert!(f.contains(&"lex[win]=must".to_string()));
        let f = featurize(&s, 1).unwrap();
        assert!(f.contains(&"lex[0]=must".to_string()));
    }

    #[test]
    fn shapes() {
        assert_eq!(shape("MUST"), "upper");
        assert_eq!(shape("2.0"), "digit");
        assert_eq!(shape(","), "punct");
        assert_eq!(shape("iPhone"), "mixed");
    }
}
