use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CompatError, ConcreteSummary, ConditionCase, ConflictRecord, ConflictSide, DefaultPolicy, ResultPair, Rule};
use crate::terms::{Attitude, TermId, TERM_COUNT};

/// Largest number of interacting conditions whose assignments are enumerated
/// exhaustively. Larger groups fall back to one condition at a time.
pub const MAX_COMPONENT_CONDITIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Left,
    Right,
}

/// A condition of one of the two licenses, by term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionRef {
    pub owner: Owner,
    pub antecedent: TermId,
    pub consequent: TermId,
}

/// Outcome of checking one license pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub incompatible: bool,
    pub conflicts: Vec<ConflictRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub result_pairs: Vec<ResultPair>,
}

pub(crate) type Attitudes = [Attitude; TERM_COUNT];

pub(crate) fn attitudes_of(s: &ConcreteSummary) -> Attitudes {
    let mut out = [Attitude::Can; TERM_COUNT];
    out.copy_from_slice(s.attitudes());
    out
}

/// Conditions of both licenses: the left license's first, each in its own
/// order.
pub(crate) fn conditions(l1: &ConcreteSummary, l2: &ConcreteSummary) -> Vec<ConditionRef> {
    let side = |s: &ConcreteSummary, owner| {
        s.summary()
            .condition_terms()
            .into_iter()
            .map(move |(antecedent, consequent)| ConditionRef {
                owner,
                antecedent,
                consequent,
            })
    };
    side(l1, Owner::Left).chain(side(l2, Owner::Right)).collect()
}

/// Applies truth assumptions to the attitudes of both licenses. A condition
/// taken as true makes its antecedent MUST; taken as false, its consequent
/// becomes CANNOT and its antecedent falls back to the default. Updates for
/// false conditions are applied before those for true ones.
pub(crate) fn assume(
    left: &mut Attitudes,
    right: &mut Attitudes,
    assumptions: &[(ConditionRef, bool)],
    policy: &DefaultPolicy,
) {
    for pass in [false, true] {
        for (c, holds) in assumptions {
            if *holds != pass {
                continue;
            }
            let target = match c.owner {
                Owner::Left => &mut *left,
                Owner::Right => &mut *right,
            };
            if *holds {
                target[c.antecedent.index()] = Attitude::Must;
            } else {
                target[c.consequent.index()] = Attitude::Cannot;
                target[c.antecedent.index()] = policy.for_term(c.antecedent);
            }
        }
    }
}

fn terms_failing(rule: Rule, left: &Attitudes, right: &Attitudes, terms: impl IntoIterator<Item = TermId>) -> Vec<TermId> {
    terms
        .into_iter()
        .filter(|t| !rule.pair_ok(left[t.index()], right[t.index()]).expect("attitudes are concrete"))
        .collect()
}

fn record(
    l1: &ConcreteSummary,
    l2: &ConcreteSummary,
    rule: Rule,
    term: TermId,
    left: Attitude,
    right: Attitude,
    case: Option<ConditionCase>,
) -> ConflictRecord {
    let side = |s: &ConcreteSummary, a: Attitude| ConflictSide {
        license: s.license().clone(),
        attitude: a,
        defaulted: s.is_defaulted(term) && s.attitude(term) == a,
    };
    ConflictRecord {
        term,
        left: side(l1, left),
        right: side(l2, right),
        rule,
        condition_case: case,
    }
}

/// Conflicts between two default-filled summaries on every term, ignoring
/// conditions. With [`Rule::PlVsCl`] the left summary is the project license.
pub fn check_incomp(l1: &ConcreteSummary, l2: &ConcreteSummary, rule: Rule) -> Vec<ConflictRecord> {
    let (a, b) = (attitudes_of(l1), attitudes_of(l2));
    terms_failing(rule, &a, &b, TermId::all())
        .into_iter()
        .map(|t| record(l1, l2, rule, t, a[t.index()], b[t.index()], None))
        .collect()
}

/// For each condition, in order, whether the pair conflicts on the
/// condition's terms when the condition is assumed true and when it is
/// assumed false.
pub fn condi_check(
    l1: &ConcreteSummary,
    l2: &ConcreteSummary,
    rule: Rule,
    policy: &DefaultPolicy,
) -> Result<Vec<ResultPair>, CompatError> {
    let conds = conditions(l1, l2);
    if conds.is_empty() {
        return Err(CompatError::NoConditions);
    }
    let base = (attitudes_of(l1), attitudes_of(l2));
    Ok(conds
        .iter()
        .map(|c| {
            let case = |holds: bool| {
                let (mut a, mut b) = base;
                assume(&mut a, &mut b, &[(*c, holds)], policy);
                !terms_failing(rule, &a, &b, [c.antecedent, c.consequent]).is_empty()
            };
            ResultPair {
                r_true: case(true),
                r_false: case(false),
            }
        })
        .collect())
}

/// Groups conditions that share a term; each group's terms are affected only
/// by the conditions in it.
pub(crate) fn components(conds: &[ConditionRef]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..TERM_COUNT).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for c in conds {
        let (a, b) = (find(&mut parent, c.antecedent.index()), find(&mut parent, c.consequent.index()));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, c) in conds.iter().enumerate() {
        groups.entry(find(&mut parent, c.antecedent.index())).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// Decides whether two licenses are incompatible.
///
/// Terms untouched by any condition are checked directly. Conditions are
/// split into groups that share terms, and every truth assignment of a group
/// is tried. Two component licenses are incompatible on a group when every
/// assignment conflicts; a pair involving the project license is
/// incompatible when some assignment conflicts.
pub fn detect(l1: &ConcreteSummary, l2: &ConcreteSummary, rule: Rule, policy: &DefaultPolicy) -> Verdict {
    let conds = conditions(l1, l2);
    if conds.is_empty() {
        let conflicts = check_incomp(l1, l2, rule);
        return Verdict {
            incompatible: !conflicts.is_empty(),
            conflicts,
            result_pairs: Vec::new(),
        };
    }
    let result_pairs = condi_check(l1, l2, rule, policy).expect("conditions are present");
    let base = (attitudes_of(l1), attitudes_of(l2));
    let conditioned: BTreeSet<TermId> = conds.iter().flat_map(|c| [c.antecedent, c.consequent]).collect();

    let mut conflicts: Vec<ConflictRecord> =
        terms_failing(rule, &base.0, &base.1, TermId::all().filter(|t| !conditioned.contains(t)))
            .into_iter()
            .map(|t| record(l1, l2, rule, t, base.0[t.index()], base.1[t.index()], Some(ConditionCase::Unconditional)))
            .collect();
    let mut incompatible = !conflicts.is_empty();

    for group in components(&conds) {
        if group.len() > MAX_COMPONENT_CONDITIONS {
            for &i in &group {
                let c = conds[i];
                let rp = result_pairs[i];
                let hit = match rule {
                    Rule::ClVsCl => rp.r_true && rp.r_false,
                    Rule::PlVsCl => rp.r_true || rp.r_false,
                };
                if hit {
                    incompatible = true;
                    for (holds, on) in [(true, rp.r_true), (false, rp.r_false)] {
                        if on {
                            conflicts.extend(case_conflicts(l1, l2, rule, policy, &base, &[(c, holds)], single_case(holds)));
                        }
                    }
                }
            }
            continue;
        }
        let terms: BTreeSet<TermId> = group.iter().flat_map(|&i| [conds[i].antecedent, conds[i].consequent]).collect();
        let n = group.len();
        let mut per_assignment: Vec<Vec<(TermId, Attitude, Attitude)>> = Vec::with_capacity(1 << n);
        for mask in 0..(1u32 << n) {
            let assumptions: Vec<(ConditionRef, bool)> =
                group.iter().enumerate().map(|(k, &i)| (conds[i], mask & (1 << k) == 0)).collect();
            let (mut a, mut b) = base;
            assume(&mut a, &mut b, &assumptions, policy);
            per_assignment.push(
                terms_failing(rule, &a, &b, terms.iter().copied())
                    .into_iter()
                    .map(|t| (t, a[t.index()], b[t.index()]))
                    .collect(),
            );
        }
        let hit = match rule {
            Rule::ClVsCl => per_assignment.iter().all(|c| !c.is_empty()),
            Rule::PlVsCl => per_assignment.iter().any(|c| !c.is_empty()),
        };
        if !hit {
            continue;
        }
        incompatible = true;
        // mask 0 assumes every condition true
        let mut seen: BTreeMap<(TermId, Attitude, Attitude), Vec<usize>> = BTreeMap::new();
        for (mask, found) in per_assignment.iter().enumerate() {
            for &key in found {
                seen.entry(key).or_default().push(mask);
            }
        }
        for ((t, a, b), masks) in seen {
            let case = if masks.len() == per_assignment.len() {
                ConditionCase::BothCases
            } else if masks.contains(&0) {
                ConditionCase::ConditionTrue
            } else {
                ConditionCase::ConditionFalse
            };
            conflicts.push(record(l1, l2, rule, t, a, b, Some(case)));
        }
    }
    conflicts.sort();
    conflicts.dedup();
    Verdict {
        incompatible,
        conflicts,
        result_pairs,
    }
}

fn single_case(holds: bool) -> ConditionCase {
    if holds {
        ConditionCase::ConditionTrue
    } else {
        ConditionCase::ConditionFalse
    }
}

fn case_conflicts(
    l1: &ConcreteSummary,
    l2: &ConcreteSummary,
    rule: Rule,
    policy: &DefaultPolicy,
    base: &(Attitudes, Attitudes),
    assumptions: &[(ConditionRef, bool)],
    case: ConditionCase,
) -> Vec<ConflictRecord> {
    let (mut a, mut b) = *base;
    assume(&mut a, &mut b, assumptions, policy);
    let terms: Vec<TermId> = assumptions.iter().flat_map(|(c, _)| [c.antecedent, c.consequent]).collect();
    terms_failing(rule, &a, &b, terms)
        .into_iter()
        .map(|t| record(l1, l2, rule, t, a[t.index()], b[t.index()], Some(case)))
        .collect()
}
