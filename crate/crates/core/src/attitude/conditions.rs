use serde::{Deserialize, Serialize};

use super::parse::ParseNode;
use super::pos::Tag;
use crate::preprocess::Sentence;
use crate::term_id::TermEntity;

/// A term in a conditional clause that governs a term in the main clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    pub antecedent: TermEntity,
    pub consequent: TermEntity,
}

/// First words of subordinators that state a condition.
const CONDITIONAL_HEADS: &[&str] = &["if", "unless", "when", "whenever", "provided", "providing", "as", "so", "on"];

fn is_conditional(sbar: &ParseNode, sentence: &Sentence) -> bool {
    sbar.children
        .first()
        .and_then(|c| c.token_index)
        .and_then(|i| sentence.tokens.get(i))
        .is_some_and(|t| CONDITIONAL_HEADS.contains(&t.surface.to_lowercase().as_str()))
}

/// Conditions stated by conditional clauses: every entity inside such a
/// clause is an antecedent of every entity in the clause enclosing it that
/// lies outside the conditional clause.
pub fn detect_conditions(tree: &ParseNode, sentence: &Sentence, entities: &[TermEntity]) -> Vec<Condition> {
    let mut out = Vec::new();
    walk(tree, None, sentence, entities, &mut out);
    out.sort();
    out.dedup();
    out
}

fn walk<'a>(
    node: &'a ParseNode,
    clause: Option<&'a ParseNode>,
    sentence: &Sentence,
    entities: &[TermEntity],
    out: &mut Vec<Condition>,
) {
    if node.tag == Tag::Sbar && is_conditional(node, sentence) {
        if let Some(clause) = clause {
            let (slo, shi) = node.range();
            let (clo, chi) = clause.range();
            let inside = |e: &TermEntity| slo <= e.start && e.end <= shi;
            let in_main = |e: &TermEntity| clo <= e.start && e.end <= chi && (e.end <= slo || e.start >= shi);
            for a in entities.iter().filter(|e| inside(e)) {
                for c in entities.iter().filter(|e| in_main(e)) {
                    out.push(Condition {
                        antecedent: *a,
                        consequent: *c,
                    });
                }
            }
        }
    }
    let clause = if node.tag == Tag::S { Some(node) } else { clause };
    for c in &node.children {
        walk(c, clause, sentence, entities, out);
    }
}
