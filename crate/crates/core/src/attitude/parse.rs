use serde::{Deserialize, Serialize};

use super::pos::{aux_base, subordinator_phrase_at, Tag, NEGATORS};
use super::AttitudeError;
use crate::preprocess::Sentence;

/// A constituency tree node. Leaves carry a word tag and the index of their
/// token; inner nodes carry a phrase tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseNode {
    pub tag: Tag,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ParseNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_index: Option<usize>,
}

impl ParseNode {
    fn leaf(tag: Tag, index: usize) -> Self {
        ParseNode {
            tag,
            children: Vec::new(),
            token_index: Some(index),
        }
    }

    fn phrase(tag: Tag, children: Vec<ParseNode>) -> Self {
        ParseNode {
            tag,
            children,
            token_index: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.token_index.is_some()
    }

    /// Token indices of all leaves under this node, in order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self.token_index {
            Some(i) => out.push(i),
            None => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Smallest token range `[lo, hi)` covering the node.
    pub fn range(&self) -> (usize, usize) {
        let l = self.leaves();
        match (l.first(), l.last()) {
            (Some(&a), Some(&b)) => (a, b + 1),
            _ => (0, 0),
        }
    }

    /// Nodes from the root down to the deepest node whose leaves cover
    /// `[start, end)`.
    pub fn path_to_cover(&self, start: usize, end: usize) -> Vec<&ParseNode> {
        let mut path = vec![self];
        let mut node = self;
        'descend: loop {
            for c in &node.children {
                let (lo, hi) = c.range();
                if lo <= start && end <= hi && hi > lo {
                    path.push(c);
                    node = c;
                    continue 'descend;
                }
            }
            return path;
        }
    }

    /// Tags on the path from the root to the leaf of token `index`.
    pub fn path_tags(&self, index: usize) -> Vec<Tag> {
        self.path_to_cover(index, index + 1).iter().map(|n| n.tag).collect()
    }

    /// Bracketed rendering, e.g. `(ROOT (S (VP (VBN 0))))`.
    pub fn render(&self, sentence: &Sentence) -> String {
        match self.token_index {
            Some(i) => format!("({} {})", self.tag, sentence.tokens.get(i).map_or("?", |t| t.surface.as_str())),
            None => {
                let inner: Vec<String> = self.children.iter().map(|c| c.render(sentence)).collect();
                format!("({} {})", self.tag, inner.join(" "))
            }
        }
    }
}

/// Builds a shallow constituency tree over tagged tokens.
///
/// The grammar is a small chunker: noun phrases, prepositional phrases, verb
/// phrases with auxiliaries nesting their main verb phrase, coordinated verb
/// phrases, lists of objects, parentheticals, and subordinate clauses opened by a conditional subordinator,
/// a relative pronoun or a complementizer and closed by `,` `;` `:` or the
/// end of the enclosing clause. Every token is a leaf exactly once.
pub fn parse_sentence(sentence: &Sentence, tags: &[Tag]) -> Result<ParseNode, AttitudeError> {
    if tags.len() != sentence.len() {
        return Err(AttitudeError::TagCount {
            tokens: sentence.len(),
            tags: tags.len(),
        });
    }
    if let Some(t) = tags.iter().find(|t| t.is_phrase()) {
        return Err(AttitudeError::TagAlphabetViolation(t.to_string()));
    }
    let words: Vec<String> = sentence.tokens.iter().map(|t| t.surface.to_lowercase()).collect();
    let p = Parser { tags, words: &words };
    let children = p.clause(0, tags.len());
    Ok(ParseNode::phrase(Tag::Root, vec![ParseNode::phrase(Tag::S, children)]))
}

struct Parser<'a> {
    tags: &'a [Tag],
    words: &'a [String],
}

impl Parser<'_> {
    fn tag(&self, i: usize) -> Option<Tag> {
        self.tags.get(i).copied()
    }

    fn word(&self, i: usize) -> &str {
        self.words.get(i).map_or("", String::as_str)
    }

    fn is_negator(&self, i: usize) -> bool {
        self.tag(i) == Some(Tag::Rb) && NEGATORS.contains(&self.word(i))
    }

    fn is_clause_break(&self, i: usize) -> bool {
        matches!(self.word(i), "," | ";" | ":")
    }

    /// Length of the subordinator opening a clause at `i`.
    fn sbar_head(&self, i: usize, hi: usize) -> Option<usize> {
        if let Some(len) = subordinator_phrase_at(self.words, i) {
            return (i + len < hi).then_some(len);
        }
        let opens = match self.tag(i)? {
            Tag::Wdt => true,
            Tag::In => matches!(self.word(i), "if" | "unless" | "whenever" | "that" | "whether"),
            _ => false,
        } || (self.word(i) == "when" && self.tag(i) == Some(Tag::In));
        (opens && i + 1 < hi).then_some(1)
    }

    fn np_start(&self, i: usize, hi: usize) -> bool {
        if i >= hi {
            return false;
        }
        match self.tag(i) {
            Some(t) if t.is_nominal() => true,
            Some(Tag::Rb) if matches!(self.word(i), "no" | "neither") => {
                i + 1 < hi && self.tag(i + 1).is_some_and(Tag::is_nominal)
            }
            _ => false,
        }
    }

    /// Start of a verb group: a modal, a verb, or `to` before a verb.
    fn verb_start(&self, i: usize, hi: usize) -> bool {
        if i >= hi {
            return false;
        }
        match self.tag(i) {
            Some(Tag::Md) => true,
            Some(t) if t.is_verb() => true,
            Some(Tag::To) => i + 1 < hi && self.tag(i + 1).is_some_and(Tag::is_verb),
            _ => false,
        }
    }

    /// First index after `i` that is not an adverb.
    fn skip_adverbs(&self, mut i: usize, hi: usize) -> usize {
        while i < hi && self.tag(i).is_some_and(Tag::is_adverb) {
            i += 1;
        }
        i
    }

    fn clause(&self, lo: usize, hi: usize) -> Vec<ParseNode> {
        let mut out = Vec::new();
        let mut i = lo;
        while i < hi {
            if self.word(i) == "(" {
                let (node, next) = self.parenthetical(i, hi);
                out.push(node);
                i = next;
            } else if let Some(len) = self.sbar_head(i, hi) {
                let (node, next) = self.sbar(i, len, hi);
                out.push(node);
                i = next;
            } else if self.np_start(i, hi) {
                let (node, next) = self.np(i, hi);
                out.push(node);
                i = next;
            } else if self.tag(i) == Some(Tag::In) {
                let (node, next) = self.pp(i, hi);
                out.push(node);
                i = next;
            } else if self.verb_start(i, hi) {
                let (nodes, next) = self.vp_group(i, hi);
                out.extend(nodes);
                i = next;
            } else {
                out.push(ParseNode::leaf(self.tags[i], i));
                i += 1;
            }
        }
        out
    }

    /// `( ... )` up to the closing bracket or the end of the clause.
    fn parenthetical(&self, i: usize, hi: usize) -> (ParseNode, usize) {
        let close = (i + 1..hi).find(|&k| self.word(k) == ")");
        let inner_end = close.unwrap_or(hi);
        let mut children = vec![ParseNode::leaf(self.tags[i], i)];
        if inner_end > i + 1 {
            children.push(ParseNode::phrase(Tag::S, self.clause(i + 1, inner_end)));
        }
        if let Some(c) = close {
            children.push(ParseNode::leaf(self.tags[c], c));
        }
        (ParseNode::phrase(Tag::Prn, children), close.map_or(hi, |c| c + 1))
    }

    /// End of a separator run (`,` or a conjunction) at `j` that continues a
    /// list of objects with another noun phrase, not a new clause.
    fn object_list_continues(&self, j: usize, hi: usize) -> Option<usize> {
        let mut k = j;
        while k < hi && (self.word(k) == "," || self.tag(k) == Some(Tag::Cc)) {
            k += 1;
        }
        let clause_subject = self.tag(k) == Some(Tag::Prp)
            || self.verb_start(self.np(k, hi).1, hi);
        (k > j && self.np_start(k, hi) && !clause_subject).then_some(k)
    }

    fn sbar(&self, i: usize, head: usize, hi: usize) -> (ParseNode, usize) {
        let mut children: Vec<ParseNode> = (i..i + head).map(|k| ParseNode::leaf(self.tags[k], k)).collect();
        let mut end = i + head;
        while end < hi && !self.is_clause_break(end) {
            end += 1;
        }
        if end > i + head {
            children.push(ParseNode::phrase(Tag::S, self.clause(i + head, end)));
        }
        (ParseNode::phrase(Tag::Sbar, children), end)
    }

    fn np(&self, i: usize, hi: usize) -> (ParseNode, usize) {
        let mut children = Vec::new();
        let mut j = i;
        if self.tag(j) == Some(Tag::Rb) {
            children.push(ParseNode::leaf(Tag::Rb, j));
            j += 1;
        }
        loop {
            while j < hi && self.tag(j).is_some_and(Tag::is_nominal) {
                children.push(ParseNode::leaf(self.tags[j], j));
                j += 1;
            }
            // coordination inside the noun phrase: "source and binary forms"
            let joins = j + 1 < hi
                && (self.tag(j) == Some(Tag::Cc) || self.word(j) == "/")
                && self.tag(j + 1).is_some_and(Tag::is_nominal);
            if !joins {
                break;
            }
            children.push(ParseNode::leaf(self.tags[j], j));
            j += 1;
        }
        (ParseNode::phrase(Tag::Np, children), j)
    }

    fn pp(&self, i: usize, hi: usize) -> (ParseNode, usize) {
        let mut children = Vec::new();
        let mut j = i;
        loop {
            while j < hi && self.tag(j) == Some(Tag::In) && self.sbar_head(j, hi).is_none() {
                children.push(ParseNode::leaf(Tag::In, j));
                j += 1;
            }
            // "with or without"
            let joins = j + 1 < hi && self.tag(j) == Some(Tag::Cc) && self.tag(j + 1) == Some(Tag::In);
            if !joins {
                break;
            }
            children.push(ParseNode::leaf(Tag::Cc, j));
            j += 1;
        }
        if children.is_empty() {
            children.push(ParseNode::leaf(self.tags[i], i));
            j = i + 1;
        }
        if self.np_start(j, hi) {
            let (np, next) = self.np(j, hi);
            children.push(np);
            j = next;
        } else if self.verb_start(j, hi) && self.tag(j).is_some_and(|t| t == Tag::Vbg) {
            let (vp, next) = self.vp(j, hi);
            children.push(vp);
            j = next;
        }
        (ParseNode::phrase(Tag::Pp, children), j)
    }

    /// A verb phrase plus any verb phrases coordinated with it.
    fn vp_group(&self, i: usize, hi: usize) -> (Vec<ParseNode>, usize) {
        let (first, mut j) = self.vp(i, hi);
        let mut out = vec![first];
        loop {
            let mut k = j;
            while k < hi && (self.tag(k) == Some(Tag::Cc) || self.word(k) == "," || self.word(k) == "/") {
                k += 1;
            }
            if k == j || !self.verb_start(k, hi) {
                break;
            }
            out.extend((j..k).map(|m| ParseNode::leaf(self.tags[m], m)));
            let (next, after) = self.vp(k, hi);
            out.push(next);
            j = after;
        }
        (out, j)
    }

    fn is_aux(&self, i: usize, hi: usize) -> bool {
        let after = self.skip_adverbs(i + 1, hi);
        match self.tag(i) {
            Some(Tag::Md) => true,
            Some(t) if t.is_verb() && aux_base(self.word(i)).is_some() => {
                let continues = self.verb_start(after, hi) && self.tag(after) != Some(Tag::To);
                continues || (self.word(i) == "don't" && after < hi)
            }
            _ => false,
        }
    }

    fn vp(&self, i: usize, hi: usize) -> (ParseNode, usize) {
        let mut children = Vec::new();
        if self.is_aux(i, hi) {
            children.push(ParseNode::leaf(self.tags[i], i));
            let mut j = i + 1;
            while j < hi && self.tag(j).is_some_and(Tag::is_adverb) {
                children.push(ParseNode::leaf(self.tags[j], j));
                j += 1;
            }
            // inversion: "shall the authors be liable"
            if self.tag(i) == Some(Tag::Md) && self.np_start(j, hi) {
                let (np, after) = self.np(j, hi);
                if self.verb_start(self.skip_adverbs(after, hi), hi) {
                    children.push(np);
                    j = after;
                    while j < hi && self.tag(j).is_some_and(Tag::is_adverb) {
                        children.push(ParseNode::leaf(self.tags[j], j));
                        j += 1;
                    }
                }
            }
            if self.verb_start(j, hi) {
                let (inner, after) = self.vp_group(j, hi);
                children.extend(inner);
                j = after;
            }
            return (ParseNode::phrase(Tag::Vp, children), j);
        }

        // verb chain: "to use , copy , modify and/or sell"
        let mut j = i;
        loop {
            if self.tag(j) == Some(Tag::To) {
                children.push(ParseNode::leaf(Tag::To, j));
                j += 1;
            }
            while j < hi && self.tag(j).is_some_and(|t| t.is_verb()) && !(j > i && self.is_aux(j, hi)) {
                children.push(ParseNode::leaf(self.tags[j], j));
                j += 1;
            }
            let mut k = j;
            while k < hi && (self.tag(k) == Some(Tag::Cc) || self.word(k) == "," || self.word(k) == "/") {
                k += 1;
            }
            let more = k > j
                && k < hi
                && (self.tag(k).is_some_and(Tag::is_verb)
                    || (self.tag(k) == Some(Tag::To) && self.tag(k + 1).is_some_and(Tag::is_verb)))
                && !self.is_aux(k, hi)
                && !children.is_empty()
                && self.chain_continues(k, hi);
            if !more {
                break;
            }
            children.extend((j..k).map(|m| ParseNode::leaf(self.tags[m], m)));
            j = k;
        }
        if children.is_empty() {
            children.push(ParseNode::leaf(self.tags[i], i));
            j = i + 1;
        }

        // complements
        while j < hi {
            if let Some(len) = self.sbar_head(j, hi) {
                let (node, next) = self.sbar(j, len, hi);
                children.push(node);
                j = next;
            } else if self.np_start(j, hi) {
                let (node, next) = self.np(j, hi);
                children.push(node);
                j = next;
            } else if self.tag(j) == Some(Tag::In) {
                let (node, next) = self.pp(j, hi);
                children.push(node);
                j = next;
            } else if self.tag(j) == Some(Tag::To) && self.verb_start(j, hi) {
                let (node, next) = self.vp(j, hi);
                children.push(node);
                j = next;
            } else if self.tag(j) == Some(Tag::To) && self.np_start(j + 1, hi) {
                // "an acknowledgement to me"
                let (node, next) = self.pp(j, hi);
                children.push(node);
                j = next;
            } else if let Some(k) = children
                .last()
                .filter(|c| matches!(c.tag, Tag::Np | Tag::Pp))
                .and_then(|_| self.object_list_continues(j, hi))
            {
                // "retain the notice , this list of conditions and the disclaimer"
                children.extend((j..k).map(|m| ParseNode::leaf(self.tags[m], m)));
                j = k;
            } else if matches!(self.tag(j), Some(Tag::Vbn | Tag::Vbg)) {
                let (node, next) = self.vp(j, hi);
                children.push(node);
                j = next;
            } else if (self.tag(j).is_some_and(Tag::is_adverb) && !self.is_negator(j))
                || (self.word(j) == ","
                    && j + 1 < hi
                    && (matches!(self.tag(j + 1), Some(Tag::Vbg)) || self.word(j + 1) == "including"))
            {
                children.push(ParseNode::leaf(self.tags[j], j));
                j += 1;
            } else {
                break;
            }
        }
        (ParseNode::phrase(Tag::Vp, children), j)
    }

    /// Whether a verb after a separator belongs to the current chain rather
    /// than starting a coordinated verb phrase with its own complements
    /// ("copy , modify , merge" versus "email me or make ...").
    fn chain_continues(&self, k: usize, hi: usize) -> bool {
        let next = if self.tag(k) == Some(Tag::To) { k + 2 } else { k + 1 };
        next >= hi
            || self.tag(next).is_some_and(Tag::is_verb)
            || self.tag(next) == Some(Tag::Cc)
            || self.word(next) == ","
            || self.word(next) == "/"
            || self.np_start(next, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::super::pos::pos_tag;
    use super::*;

    fn parse(s: &str) -> (Sentence, ParseNode) {
        let sent = Sentence::from_raw(s, 0);
        let tags = pos_tag(&sent);
        let tree = parse_sentence(&sent, &tags).unwrap();
        (sent, tree)
    }

    fn names(tags: Vec<Tag>) -> Vec<&'static str> {
        tags.into_iter().map(Tag::as_str).collect()
    }

    fn leaves_once(tree: &ParseNode, n: usize) {
        assert_eq!(tree.leaves(), (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn single_participle() {
        let (s, t) = parse("Permitted.");
        assert_eq!(names(t.path_tags(0)), ["ROOT", "S", "VP", "VBN"]);
        leaves_once(&t, s.len());
    }

    #[test]
    fn figure_sentence_paths() {
        let (s, t) = parse("you can not refuse such a promise that significant changes must be declared");
        assert_eq!(names(t.path_tags(3)), ["ROOT", "S", "VP", "VP", "VB"]);
        let cover = t.path_to_cover(8, 13);
        assert_eq!(cover.last().unwrap().tag, Tag::S);
        assert!(cover.iter().any(|n| n.tag == Tag::Sbar));
        leaves_once(&t, s.len());
    }

    #[test]
    fn conditional_clause() {
        let (s, t) = parse("you can modify if you state changes");
        let path = names(t.path_tags(5));
        assert!(path.contains(&"SBAR"), "{}", t.render(&s));
        let (s, t) = parse("If you state changes, you can modify the work.");
        assert_eq!(names(t.path_tags(1))[..3], ["ROOT", "S", "SBAR"]);
        assert!(!names(t.path_tags(7)).contains(&"SBAR"), "{}", t.render(&s));
        leaves_once(&t, s.len());
    }

    #[test]
    fn coordination_and_inversion() {
        let (s, t) = parse("Do not email me about it or make an obvious acknowledgement to me");
        let make = s.tokens.iter().position(|t| t.surface == "make").unwrap();
        assert_eq!(names(t.path_tags(make)), ["ROOT", "S", "VP", "VP", "VB"], "{}", t.render(&s));
        let (s, t) = parse("In no event shall the authors be liable for any claim.");
        let be = s.tokens.iter().position(|t| t.surface == "be").unwrap();
        assert_eq!(names(t.path_tags(be)), ["ROOT", "S", "VP", "VP", "VB"], "{}", t.render(&s));
        leaves_once(&t, s.len());
    }

    #[test]
    fn verb_chain() {
        let (s, t) = parse("the rights to use, copy, modify, merge and/or sell copies of the Software");
        let use_ = s.tokens.iter().position(|t| t.surface == "use").unwrap();
        let sell = s.tokens.iter().position(|t| t.surface == "sell").unwrap();
        let a = t.path_to_cover(use_, use_ + 1);
        let b = t.path_to_cover(sell, sell + 1);
        assert!(std::ptr::eq(a[a.len() - 2], b[b.len() - 2]), "{}", t.render(&s));
    }

    #[test]
    fn rejects_phrase_tags_and_bad_counts() {
        let s = Sentence::from_raw("use it", 0);
        assert!(matches!(
            parse_sentence(&s, &[Tag::Vb, Tag::Np]),
            Err(AttitudeError::TagAlphabetViolation(_))
        ));
        assert!(parse_sentence(&s, &[Tag::Vb]).is_err());
    }
}
