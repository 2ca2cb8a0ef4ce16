use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lexicon::AttitudeLexicon;
use super::parse::{parse_sentence, ParseNode};
use super::pos::{pos_tag, Tag};
use super::AttitudeError;
use crate::preprocess::{Sentence, Token};
use crate::term_id::TermEntity;
use crate::terms::Attitude;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Locality {
    Internal,
    External,
}

/// A token whose part of speech can carry permissive or restrictive force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PowerfulToken {
    pub token_index: usize,
    pub pos: Tag,
    pub locality: Locality,
}

/// Words that open clauses. Tagged IN, they mark an attitude only as part of
/// a multiword entry such as "as long as".
const SUBORDINATORS: &[&str] = &[
    "if", "unless", "when", "whenever", "provided", "providing", "that", "whether", "as", "so", "long", "on",
    "condition", "where",
];

fn eligible(tags: &[Tag], i: usize) -> bool {
    tags.get(i).is_some_and(|t| t.is_pt_eligible())
}

/// Internal and external powerful tokens of an entity.
///
/// Internal tokens are the eligible tokens inside the span. External tokens
/// come from the clause structure above the entity: the direct leaves of every
/// verb phrase on the path from the root to the entity, and for every clause
/// on that path its direct leaves, the negators ahead of its predicate and,
/// when the entity sits outside the predicate (a subject), the verb chain of
/// the predicate that follows it. A preposition whose object holds the entity
/// is external too. The head words of a subordinate clause
/// ("as long as", "provided that") are external tokens of the entities inside
/// that clause.
pub fn collect_pts(tree: &ParseNode, entity: &TermEntity, tags: &[Tag]) -> Result<Vec<PowerfulToken>, AttitudeError> {
    let len = tags.len();
    if entity.is_empty() || entity.end > len {
        return Err(AttitudeError::SpanOutOfRange {
            start: entity.start,
            end: entity.end,
            len,
        });
    }
    let mut found: BTreeMap<usize, Locality> = BTreeMap::new();
    for i in entity.start..entity.end {
        if eligible(tags, i) {
            found.insert(i, Locality::Internal);
        }
    }
    let mut external = Vec::new();
    let path = tree.path_to_cover(entity.start, entity.end);
    for (k, node) in path.iter().enumerate() {
        match node.tag {
            Tag::Vp | Tag::Sbar => direct_leaves(node, &mut external),
            Tag::S => clause_tokens(node, entity, &mut external),
            // a preposition governs the entity only through noun phrases
            Tag::Pp if path[k + 1..].iter().all(|n| matches!(n.tag, Tag::Np | Tag::Pp) || n.is_leaf()) => {
                direct_leaves(node, &mut external)
            }
            _ => {}
        }
    }
    for i in external {
        if eligible(tags, i) && !entity.contains(i) {
            found.entry(i).or_insert(Locality::External);
        }
    }
    Ok(found
        .into_iter()
        .map(|(token_index, locality)| PowerfulToken {
            token_index,
            pos: tags[token_index],
            locality,
        })
        .collect())
}

fn direct_leaves(node: &ParseNode, out: &mut Vec<usize>) {
    out.extend(node.children.iter().filter_map(|c| c.token_index));
}

/// Leaves of a verb phrase and of the verb phrases nested in it.
fn verb_chain(node: &ParseNode, out: &mut Vec<usize>) {
    direct_leaves(node, out);
    for c in &node.children {
        if c.tag == Tag::Vp {
            verb_chain(c, out);
        }
    }
}

fn negator_leaves(node: &ParseNode, tags_out: &mut Vec<usize>) {
    match node.tag {
        Tag::Rb if node.is_leaf() => tags_out.extend(node.token_index),
        Tag::Np | Tag::Pp => node.children.iter().for_each(|c| negator_leaves(c, tags_out)),
        _ => {}
    }
}

fn clause_tokens(node: &ParseNode, entity: &TermEntity, out: &mut Vec<usize>) {
    direct_leaves(node, out);
    let first_vp = node.children.iter().position(|c| c.tag == Tag::Vp);
    let before = first_vp.unwrap_or(node.children.len());
    for c in &node.children[..before] {
        if !c.is_leaf() {
            negator_leaves(c, out);
        }
    }
    let in_predicate = node.children.iter().any(|c| {
        let (lo, hi) = c.range();
        c.tag == Tag::Vp && lo <= entity.start && entity.end <= hi
    });
    if !in_predicate {
        if let Some(vp) = node.children.iter().find(|c| c.tag == Tag::Vp && c.range().0 >= entity.end) {
            verb_chain(vp, out);
        }
    }
}

/// Marks `Cannot` and `Must` assigned to powerful tokens, as
/// `(token indices, attitude)` pairs. Multiword entries are matched first,
/// need at least one powerful token among their words, and count once.
pub fn marks(pts: &[PowerfulToken], tokens: &[Token], lexicon: &AttitudeLexicon) -> Vec<(Vec<usize>, Attitude)> {
    let is_pt: BTreeMap<usize, Tag> = pts.iter().map(|p| (p.token_index, p.pos)).collect();
    let can_mark = |i: usize| match is_pt.get(&i) {
        Some(Tag::In) => !SUBORDINATORS.contains(&tokens[i].surface.to_lowercase().as_str()),
        Some(_) => true,
        None => false,
    };
    let mut used = vec![false; tokens.len()];
    let mut out = Vec::new();
    for (phrase, att) in lexicon.phrases() {
        let n = phrase.len();
        if n > tokens.len() {
            continue;
        }
        for start in 0..=tokens.len() - n {
            let span = start..start + n;
            let matches = span.clone().all(|k| !used[k] && tokens[k].stem == phrase[k - start]);
            if matches && span.clone().any(|k| is_pt.contains_key(&k)) {
                span.clone().for_each(|k| used[k] = true);
                out.push((span.collect(), att));
            }
        }
    }
    for p in pts {
        let i = p.token_index;
        if i >= tokens.len() || used[i] || !can_mark(i) {
            continue;
        }
        if let Some(att) = lexicon.single(&tokens[i].stem) {
            out.push((vec![i], att));
        }
    }
    out.sort();
    out
}

/// Combines the marks of an entity's powerful tokens into one attitude.
///
/// An odd number of CANNOT marks negates the statement and yields CANNOT,
/// whatever else is marked. With an even number the negations cancel, and
/// any MUST mark makes the result MUST. Otherwise the result is CAN.
pub fn infer_attitude(pts: &[PowerfulToken], tokens: &[Token], lexicon: &AttitudeLexicon) -> Attitude {
    aggregate(&marks(pts, tokens, lexicon))
}

/// Attitude of one entity of `sentence`, with the powerful tokens behind it.
pub fn entity_attitude(
    sentence: &Sentence,
    entity: &TermEntity,
    lexicon: &AttitudeLexicon,
) -> Result<(Attitude, Vec<PowerfulToken>), AttitudeError> {
    let tags = pos_tag(sentence);
    let tree = parse_sentence(sentence, &tags)?;
    let pts = collect_pts(&tree, entity, &tags)?;
    Ok((infer_attitude(&pts, &sentence.tokens, lexicon), pts))
}

pub(crate) fn aggregate(marks: &[(Vec<usize>, Attitude)]) -> Attitude {
    let cannot = marks.iter().filter(|(_, a)| *a == Attitude::Cannot).count();
    let must = marks.iter().any(|(_, a)| *a == Attitude::Must);
    if cannot % 2 == 1 {
        Attitude::Cannot
    } else if must {
        Attitude::Must
    } else {
        Attitude::Can
    }
}
