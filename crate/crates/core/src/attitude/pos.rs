use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AttitudeError;
use crate::preprocess::{Sentence, Token};

/// Part-of-speech and phrase tags (Penn Treebank names).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Tag {
    // phrase tags
    Root,
    S,
    Sbar,
    Np,
    Vp,
    Pp,
    Whnp,
    Prn,
    // word tags
    Cc,
    Cd,
    Dt,
    In,
    Jj,
    Md,
    Nn,
    Nns,
    Pdt,
    Prp,
    PrpS,
    Rb,
    Rbr,
    Rbs,
    To,
    Vb,
    Vbd,
    Vbg,
    Vbn,
    Vbp,
    Vbz,
    Wdt,
    Punct,
}

const NAMES: &[(Tag, &str)] = &[
    (Tag::Root, "ROOT"),
    (Tag::S, "S"),
    (Tag::Sbar, "SBAR"),
    (Tag::Np, "NP"),
    (Tag::Vp, "VP"),
    (Tag::Pp, "PP"),
    (Tag::Whnp, "WHNP"),
    (Tag::Prn, "PRN"),
    (Tag::Cc, "CC"),
    (Tag::Cd, "CD"),
    (Tag::Dt, "DT"),
    (Tag::In, "IN"),
    (Tag::Jj, "JJ"),
    (Tag::Md, "MD"),
    (Tag::Nn, "NN"),
    (Tag::Nns, "NNS"),
    (Tag::Pdt, "PDT"),
    (Tag::Prp, "PRP"),
    (Tag::PrpS, "PRP$"),
    (Tag::Rb, "RB"),
    (Tag::Rbr, "RBR"),
    (Tag::Rbs, "RBS"),
    (Tag::To, "TO"),
    (Tag::Vb, "VB"),
    (Tag::Vbd, "VBD"),
    (Tag::Vbg, "VBG"),
    (Tag::Vbn, "VBN"),
    (Tag::Vbp, "VBP"),
    (Tag::Vbz, "VBZ"),
    (Tag::Wdt, "WDT"),
    (Tag::Punct, "."),
];

impl Tag {
    pub fn as_str(self) -> &'static str {
        NAMES.iter().find(|(t, _)| *t == self).map(|(_, n)| *n).expect("every tag is named")
    }

    pub fn is_phrase(self) -> bool {
        matches!(self, Tag::Root | Tag::S | Tag::Sbar | Tag::Np | Tag::Vp | Tag::Pp | Tag::Whnp | Tag::Prn)
    }

    pub fn is_verb(self) -> bool {
        matches!(self, Tag::Vb | Tag::Vbd | Tag::Vbg | Tag::Vbn | Tag::Vbp | Tag::Vbz)
    }

    pub fn is_adverb(self) -> bool {
        matches!(self, Tag::Rb | Tag::Rbr | Tag::Rbs)
    }

    /// Tags whose tokens can carry permissive or restrictive force.
    pub fn is_pt_eligible(self) -> bool {
        self.is_verb() || self.is_adverb() || matches!(self, Tag::Md | Tag::In)
    }

    pub fn is_nominal(self) -> bool {
        matches!(self, Tag::Pdt | Tag::Dt | Tag::Jj | Tag::Nn | Tag::Nns | Tag::Prp | Tag::PrpS | Tag::Cd)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = AttitudeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NAMES
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(t, _)| *t)
            .ok_or_else(|| AttitudeError::TagAlphabetViolation(s.to_string()))
    }
}

impl From<Tag> for String {
    fn from(t: Tag) -> String {
        t.as_str().to_string()
    }
}

impl TryFrom<String> for Tag {
    type Error = AttitudeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Negation words. They are tagged RB wherever they occur.
pub const NEGATORS: &[&str] = &["not", "n't", "no", "never", "neither", "nor", "nothing"];

const MODALS: &[&str] = &["can", "could", "may", "might", "must", "shall", "should", "will", "would", "ca", "wo"];

const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "with", "without", "from", "into", "onto", "under", "over", "about",
    "against", "between", "through", "throughout", "during", "before", "after", "upon", "within", "except",
    "including", "regarding", "notwithstanding", "whether", "than", "as", "because", "although", "though",
    "while", "via", "per", "beyond", "toward", "towards", "among", "if", "unless", "whenever", "until", "out",
    "excluding", "concerning", "when", "where", "whereas", "despite", "unto", "alongside", "outside", "inside", "behind", "around", "like",
];

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "these", "those", "any", "each", "every", "some", "another", "either", "other",
    "such", "all", "both", "its", "whatever", "said",
];

const PRONOUNS: &[&str] = &[
    "you", "he", "she", "it", "they", "we", "i", "me", "him", "her", "them", "us", "yourself", "itself",
    "themselves", "anyone", "anybody", "everyone", "someone", "one",
];

const POSSESSIVES: &[&str] = &["your", "their", "his", "our", "my"];

const CONJUNCTIONS: &[&str] = &["and", "or", "but", "and/or"];

const WH_WORDS: &[&str] = &["which", "who", "whom", "whose", "whoever"];

const ADVERBS: &[&str] = &[
    "also", "only", "hereby", "herein", "thereof", "therein", "hereunder", "otherwise", "even", "just", "very",
    "then", "here", "there", "therefore", "further", "furthermore", "however", "so", "too", "always", "again",
    "instead", "thus", "hence", "else", "soon", "still", "yet", "already", "perpetually", "freely", "well",
    "forth", "away", "back", "together", "irrevocably", "anywhere", "elsewhere",
];

const ADJECTIVES: &[&str] = &[
    "liable", "responsible", "free", "same", "above", "prior", "written", "original", "following", "able",
    "subject", "open", "public", "private", "commercial", "non-commercial", "applicable", "available",
    "entire", "sole", "full", "express", "implied", "specific", "prominent", "reasonable", "appropriate",
    "unmodified", "modified", "new", "binary", "executable", "significant", "obvious", "due", "legal",
    "other", "separate", "whole", "own", "worldwide", "royalty-free", "non-exclusive", "perpetual",
    "direct", "indirect", "incidental", "special", "exemplary", "consequential", "fit", "particular",
    "void", "null", "valid", "true", "good", "evil", "third", "first", "second", "older", "later",
];

/// Base forms of verbs common in license text.
const VERBS: &[&str] = &[
    "use", "copy", "modify", "merge", "publish", "distribute", "redistribute", "sublicense", "sell", "license",
    "relicense", "grant", "permit", "retain", "reproduce", "include", "give", "provide", "make", "state", "change",
    "disclose", "link", "compile", "endorse", "promote", "refuse", "decline", "delete", "remove", "prohibit",
    "disallow", "void", "hold", "charge", "pay", "accept", "agree", "apply", "comply", "notify", "contact",
    "email", "rename", "place", "offer", "assume", "waive", "claim", "display", "perform", "prepare", "create",
    "deal", "obtain", "ship", "run", "install", "share", "send", "ask", "ensure", "require", "keep", "contain",
    "accompany", "mark", "attribute", "acknowledge", "cite", "declare", "describe", "identify", "limit",
    "restrict", "exclude", "disclaim", "warrant", "indemnify", "defend", "sue", "infringe", "terminate",
    "cease", "stop", "allow", "let", "add", "put", "reverse", "decompile", "disassemble", "rent", "lease", "lend",
    "transfer", "assign", "host", "incorporate", "combine", "bundle", "package", "embed", "upload", "download",
    "post", "mention", "write", "print", "read", "translate", "adapt", "alter", "convert", "see", "follow",
    "meet", "receive", "deliver", "sign", "pass", "fork", "port", "label", "buy", "think", "return", "honor",
    "credit", "compensate", "reimburse", "exceed", "inform", "tell", "alert", "register", "construe", "arise",
    "result", "cause", "bear", "appear", "sublicence", "licence", "furnish", "execute", "modify", "submit",
    "contribute", "derive", "supply", "exercise", "enforce", "breach", "violate", "sponsor", "imply", "express",
    "forbid", "ban", "preserve", "maintain", "leave", "document", "explain", "note", "record", "list", "attach",
    "grant", "stay", "remain", "become", "connect", "redistribut", "integrate", "expose", "keep", "want", "wish",
];

/// Irregular forms: (surface, base, tag).
const IRREGULAR: &[(&str, &str, Tag)] = &[
    ("be", "be", Tag::Vb),
    ("is", "be", Tag::Vbz),
    ("are", "be", Tag::Vbp),
    ("am", "be", Tag::Vbp),
    ("was", "be", Tag::Vbd),
    ("were", "be", Tag::Vbd),
    ("been", "be", Tag::Vbn),
    ("being", "be", Tag::Vbg),
    ("have", "have", Tag::Vbp),
    ("has", "have", Tag::Vbz),
    ("had", "have", Tag::Vbd),
    ("having", "have", Tag::Vbg),
    ("do", "do", Tag::Vbp),
    ("does", "do", Tag::Vbz),
    ("did", "do", Tag::Vbd),
    ("done", "do", Tag::Vbn),
    ("doing", "do", Tag::Vbg),
    ("don't", "do", Tag::Vbp),
    ("given", "give", Tag::Vbn),
    ("gave", "give", Tag::Vbd),
    ("made", "make", Tag::Vbn),
    ("held", "hold", Tag::Vbn),
    ("sold", "sell", Tag::Vbn),
    ("paid", "pay", Tag::Vbn),
    ("kept", "keep", Tag::Vbn),
    ("sent", "send", Tag::Vbn),
    ("written", "write", Tag::Vbn),
    ("put", "put", Tag::Vb),
    ("let", "let", Tag::Vb),
    ("run", "run", Tag::Vb),
    ("found", "find", Tag::Vbn),
    ("brought", "bring", Tag::Vbn),
    ("bought", "buy", Tag::Vbn),
    ("taken", "take", Tag::Vbn),
    ("take", "take", Tag::Vb),
    ("got", "get", Tag::Vbn),
    ("get", "get", Tag::Vb),
    ("thought", "think", Tag::Vbn),
    ("left", "leave", Tag::Vbn),
    ("become", "become", Tag::Vb),
    ("became", "become", Tag::Vbd),
    ("forbidden", "forbid", Tag::Vbn),
    ("borne", "bear", Tag::Vbn),
    ("arising", "arise", Tag::Vbg),
    ("meet", "meet", Tag::Vb),
    ("met", "meet", Tag::Vbn),
    ("read", "read", Tag::Vb),
    ("see", "see", Tag::Vb),
    ("seen", "see", Tag::Vbn),
    ("sue", "sue", Tag::Vb),
];

fn irregular(word: &str) -> Option<Tag> {
    IRREGULAR.iter().find(|(s, _, _)| *s == word).map(|(_, _, t)| *t)
}

/// Auxiliary verbs: forms of be, have and do.
pub(crate) fn aux_base(word: &str) -> Option<&'static str> {
    IRREGULAR
        .iter()
        .find(|(s, b, _)| *s == word && matches!(*b, "be" | "have" | "do"))
        .map(|(_, b, _)| *b)
}

fn is_known_verb(base: &str) -> bool {
    VERBS.contains(&base)
}

/// Inflection class of a word that inflects a known verb.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Inflection {
    Base,
    ThirdPerson,
    Past,
    Gerund,
}

fn verb_inflection(w: &str) -> Option<Inflection> {
    if is_known_verb(w) {
        return Some(Inflection::Base);
    }
    let candidates = |stem: &str| -> bool {
        is_known_verb(stem) || is_known_verb(&format!("{stem}e")) || {
            let b = stem.as_bytes();
            b.len() >= 3 && b[b.len() - 1] == b[b.len() - 2] && is_known_verb(&stem[..stem.len() - 1])
        }
    };
    if let Some(s) = w.strip_suffix("ies") {
        if is_known_verb(&format!("{s}y")) {
            return Some(Inflection::ThirdPerson);
        }
    }
    if let Some(s) = w.strip_suffix("es") {
        if is_known_verb(s) {
            return Some(Inflection::ThirdPerson);
        }
    }
    if let Some(s) = w.strip_suffix('s') {
        if is_known_verb(s) {
            return Some(Inflection::ThirdPerson);
        }
    }
    if let Some(s) = w.strip_suffix("ied") {
        if is_known_verb(&format!("{s}y")) {
            return Some(Inflection::Past);
        }
    }
    if let Some(s) = w.strip_suffix("ed") {
        if candidates(s) || is_known_verb(&format!("{s}e")) {
            return Some(Inflection::Past);
        }
    }
    if let Some(s) = w.strip_suffix('d') {
        if is_known_verb(s) {
            return Some(Inflection::Past);
        }
    }
    if let Some(s) = w.strip_suffix("ing") {
        if candidates(s) {
            return Some(Inflection::Gerund);
        }
    }
    None
}

fn is_punct(surface: &str) -> bool {
    !surface.chars().any(char::is_alphanumeric)
}

fn suffix_tag(w: &str) -> Tag {
    if w.len() > 4 && w.ends_with("ing") {
        Tag::Vbg
    } else if w.len() > 3 && w.ends_with("ed") {
        Tag::Vbn
    } else if w.len() > 4 && w.ends_with("ly") {
        Tag::Rb
    } else if ["ous", "ful", "able", "ible", "ive", "ic", "ary", "less", "ent", "ant"]
        .iter()
        .any(|s| w.len() > s.len() + 2 && w.ends_with(s))
    {
        Tag::Jj
    } else if w.len() > 3 && w.ends_with('s') && !w.ends_with("ss") && !w.ends_with("us") {
        Tag::Nns
    } else {
        Tag::Nn
    }
}

/// Multiword subordinators, tagged IN as a unit.
const SUBORDINATOR_PHRASES: &[&[&str]] = &[
    &["as", "long", "as"],
    &["so", "long", "as"],
    &["provided", "that"],
    &["providing", "that"],
    &["on", "condition", "that"],
];

/// Length of the subordinator phrase starting at `i`, if any.
pub(crate) fn subordinator_phrase_at(words: &[String], i: usize) -> Option<usize> {
    SUBORDINATOR_PHRASES
        .iter()
        .find(|p| words.len() >= i + p.len() && p.iter().zip(&words[i..]).all(|(a, b)| *a == b.as_str()))
        .map(|p| p.len())
}

fn lower_words(tokens: &[Token]) -> Vec<String> {
    tokens.iter().map(|t| t.surface.to_lowercase()).collect()
}

/// Rule-based part-of-speech tagger.
///
/// Closed-class words come from fixed lists, verbs from a lexicon of license
/// verbs with their inflections, and everything else from suffix rules with
/// NN as the fallback. Words that can be either noun or verb ("use",
/// "changes", "copy") are resolved from the preceding tag.
pub fn pos_tag(sentence: &Sentence) -> Vec<Tag> {
    let words = lower_words(&sentence.tokens);
    let n = words.len();
    let mut tags: Vec<Tag> = vec![Tag::Nn; n];
    let mut locked = vec![false; n];

    let mut i = 0;
    while i < n {
        if let Some(len) = subordinator_phrase_at(&words, i) {
            for k in i..i + len {
                tags[k] = Tag::In;
                locked[k] = true;
            }
            i += len;
        } else {
            i += 1;
        }
    }

    let mut seen_neither = false;
    for i in 0..n {
        if locked[i] {
            continue;
        }
        let w = words[i].as_str();
        let prev = if i > 0 { Some(tags[i - 1]) } else { None };
        let prev_word = if i > 0 { words[i - 1].as_str() } else { "" };
        let next_word = words.get(i + 1).map(String::as_str).unwrap_or("");
        let tag = if is_punct(w) {
            Tag::Punct
        } else if w.chars().all(|c| c.is_ascii_digit() || c == '.') {
            Tag::Cd
        } else if w == "nor" && seen_neither {
            Tag::Cc
        } else if NEGATORS.contains(&w) {
            if w == "neither" {
                seen_neither = true;
            }
            Tag::Rb
        } else if MODALS.contains(&w) {
            if matches!(w, "will") && prev == Some(Tag::Dt) {
                Tag::Nn
            } else {
                Tag::Md
            }
        } else if w == "to" {
            Tag::To
        } else if w == "that" {
            that_tag(prev, next_word)
        } else if WH_WORDS.contains(&w) {
            Tag::Wdt
        } else if CONJUNCTIONS.contains(&w) {
            Tag::Cc
        } else if POSSESSIVES.contains(&w) {
            Tag::PrpS
        } else if PRONOUNS.contains(&w) {
            Tag::Prp
        } else if matches!(w, "all" | "both" | "such" | "half") && matches!(next_word, "the" | "a" | "an" | "this" | "these" | "those" | "your" | "its" | "their") {
            Tag::Pdt
        } else if DETERMINERS.contains(&w) {
            Tag::Dt
        } else if let Some(t) = irregular(w) {
            if t == Tag::Vbp && (matches!(prev, Some(Tag::Md | Tag::To)) || i == 0) {
                Tag::Vb
            } else {
                t
            }
        } else if PREPOSITIONS.contains(&w) {
            Tag::In
        } else if ADVERBS.contains(&w) {
            Tag::Rb
        } else if ADJECTIVES.contains(&w) && !verb_context(prev, prev_word) {
            Tag::Jj
        } else if let Some(inf) = verb_inflection(w) {
            verb_or_noun(inf, w, prev, prev_word, next_word, i, &tags)
        } else {
            let t = suffix_tag(w);
            match t {
                Tag::Vbg if matches!(prev, Some(Tag::Dt | Tag::Pdt | Tag::PrpS)) => Tag::Jj,
                t => t,
            }
        };
        tags[i] = tag;
    }
    tags
}

fn that_tag(prev: Option<Tag>, next_word: &str) -> Tag {
    match prev {
        Some(Tag::Nn | Tag::Nns) => Tag::Wdt,
        Some(t) if t.is_verb() => Tag::In,
        _ if matches!(next_word, "software" | "work" | "license" | "file" | "code" | "program") => Tag::Dt,
        _ => Tag::In,
    }
}

fn verb_context(prev: Option<Tag>, prev_word: &str) -> bool {
    matches!(prev, Some(Tag::Md | Tag::To)) || (prev == Some(Tag::Rb) && prev_word != "no")
}

fn verb_or_noun(
    inf: Inflection,
    w: &str,
    prev: Option<Tag>,
    prev_word: &str,
    next_word: &str,
    i: usize,
    tags: &[Tag],
) -> Tag {
    let nominal_context = matches!(
        prev,
        Some(Tag::Dt | Tag::Pdt | Tag::Jj | Tag::PrpS | Tag::Cd | Tag::In)
    );
    // after a conjunction, follow the word class before it
    let coordinated_noun = prev == Some(Tag::Cc) && i >= 2 && matches!(tags[i - 2], Tag::Nn | Tag::Nns);
    let coordinated_verb = matches!(prev, Some(Tag::Cc | Tag::Punct)) && i >= 2 && tags[i - 2].is_verb();
    match inf {
        Inflection::Base => {
            if coordinated_verb {
                if tags[i - 2] == Tag::Vbp { Tag::Vbp } else { Tag::Vb }
            } else if nominal_context || coordinated_noun {
                Tag::Nn
            } else if matches!(prev, Some(Tag::Md | Tag::To | Tag::Rb)) || i == 0 {
                Tag::Vb
            } else if matches!(prev, Some(Tag::Prp | Tag::Nns)) || prev_word == "who" {
                Tag::Vbp
            } else if matches!(prev, Some(Tag::Nn)) {
                if matches!(next_word, "the" | "a" | "an" | "your" | "it" | "them" | "this") { Tag::Vbp } else { Tag::Nn }
            } else {
                Tag::Vb
            }
        }
        Inflection::ThirdPerson => {
            // "via url links": a noun after a preposition starts a compound
            let compound = prev == Some(Tag::Nn) && i >= 2 && tags[i - 2] == Tag::In;
            let subject = (matches!(prev, Some(Tag::Nn | Tag::Prp)) && !compound) || prev_word == "nothing";
            if subject && !nominal_context && prev_word != "of" {
                Tag::Vbz
            } else {
                Tag::Nns
            }
        }
        Inflection::Past => {
            if matches!(prev, Some(Tag::Prp)) && !w.is_empty() {
                Tag::Vbd
            } else {
                Tag::Vbn
            }
        }
        Inflection::Gerund => {
            if matches!(prev, Some(Tag::Dt | Tag::Pdt | Tag::PrpS)) {
                Tag::Jj
            } else {
                Tag::Vbg
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(s: &str) -> Vec<String> {
        pos_tag(&Sentence::from_raw(s, 0)).into_iter().map(String::from).collect()
    }

    #[test]
    fn closed_class_and_suffixes() {
        assert_eq!(tags("must"), ["MD"]);
        assert_eq!(tags("permitted"), ["VBN"]);
        assert_eq!(tags("significant changes"), ["JJ", "NNS"]);
        assert_eq!(tags("Do not redistribute ."), ["VB", "RB", "VB", "."]);
    }

    #[test]
    fn figure_sentence() {
        assert_eq!(
            tags("you can not refuse such a promise that significant changes must be declared"),
            ["PRP", "MD", "RB", "VB", "PDT", "DT", "NN", "WDT", "JJ", "NNS", "MD", "VB", "VBN"]
        );
    }

    #[test]
    fn neither_nor_and_subordinators() {
        let t = tags("Neither the name nor the names may be used");
        assert_eq!(t[0], "RB");
        assert_eq!(t[3], "CC");
        let t = tags("as long as you state changes");
        assert_eq!(&t[..3], ["IN", "IN", "IN"]);
        assert_eq!(t[4], "VBP");
        assert_eq!(t[5], "NNS");
    }

    #[test]
    fn noun_verb_ambiguity() {
        assert_eq!(tags("Redistribution and use in source"), ["NN", "CC", "NN", "IN", "NN"]);
        assert_eq!(tags("you may use it"), ["PRP", "MD", "VB", "PRP"]);
        assert_eq!(tags("copy , modify , merge"), ["VB", ".", "VB", ".", "VB"]);
    }

    #[test]
    fn tag_names_round_trip() {
        for (t, n) in NAMES {
            assert_eq!(n.parse::<Tag>().unwrap(), *t);
        }
        assert!("XYZ".parse::<Tag>().is_err());
    }
}
