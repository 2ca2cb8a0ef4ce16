//! Incompatibility detection between license summaries.

mod detect;
mod oracle;
mod project;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::attitude::{Evidence, LicenseRef, LicenseSummary};
use crate::terms::{Attitude, Category, TermId, TERM_COUNT};

pub use detect::{check_incomp, condi_check, detect, ConditionRef, Owner, Verdict, MAX_COMPONENT_CONDITIONS};
pub use oracle::detect_brute_force;
pub use project::{analyze_project, ProjectReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompatError {
    #[error("attitude {0} is not concrete")]
    UnknownAttitude(Attitude),
    #[error("neither license states a condition")]
    NoConditions,
    #[error("default attitude must be CAN or CANNOT, got {0}")]
    InvalidDefault(Attitude),
}

/// Attitudes assumed for terms a license never mentions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefaultPolicy {
    pub absent_right: Attitude,
    pub absent_obligation: Attitude,
}

impl Default for DefaultPolicy {
    fn default() -> Self {
        DefaultPolicy {
            absent_right: Attitude::Cannot,
            absent_obligation: Attitude::Can,
        }
    }
}

impl DefaultPolicy {
    pub fn new(absent_right: Attitude, absent_obligation: Attitude) -> Result<Self, CompatError> {
        for a in [absent_right, absent_obligation] {
            if !matches!(a, Attitude::Can | Attitude::Cannot) {
                return Err(CompatError::InvalidDefault(a));
            }
        }
        Ok(DefaultPolicy {
            absent_right,
            absent_obligation,
        })
    }

    pub fn for_term(&self, term: TermId) -> Attitude {
        match term.category() {
            Category::Right => self.absent_right,
            Category::Obligation => self.absent_obligation,
        }
    }
}

/// A summary without UNKNOWN attitudes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConcreteSummary(LicenseSummary);

impl ConcreteSummary {
    pub fn new(summary: LicenseSummary) -> Result<Self, CompatError> {
        match summary.attitudes.iter().find(|a| !a.is_concrete()) {
            Some(&a) => Err(CompatError::UnknownAttitude(a)),
            None if summary.attitudes.len() != TERM_COUNT => Err(CompatError::UnknownAttitude(Attitude::Unknown)),
            None => Ok(ConcreteSummary(summary)),
        }
    }

    pub fn summary(&self) -> &LicenseSummary {
        &self.0
    }

    pub fn into_inner(self) -> LicenseSummary {
        self.0
    }

    pub fn license(&self) -> &LicenseRef {
        &self.0.license
    }

    pub fn attitude(&self, term: TermId) -> Attitude {
        self.0.attitudes[term.index()]
    }

    pub fn attitudes(&self) -> &[Attitude] {
        &self.0.attitudes
    }

    /// True when the attitude toward `term` came from the default policy.
    pub fn is_defaulted(&self, term: TermId) -> bool {
        let ev = &self.0.evidence[term.index()];
        !ev.is_empty() && ev.iter().all(|e| e.defaulted)
    }
}

/// Replaces every UNKNOWN attitude with the policy's default for the term's
/// category and records a defaulted evidence entry for it.
pub fn default_fill(summary: &LicenseSummary, policy: &DefaultPolicy) -> ConcreteSummary {
    let mut out = summary.clone();
    out.attitudes.resize(TERM_COUNT, Attitude::Unknown);
    out.evidence.resize(TERM_COUNT, Vec::new());
    for term in TermId::all() {
        if !out.attitudes[term.index()].is_concrete() {
            let a = policy.for_term(term);
            out.attitudes[term.index()] = a;
            out.evidence[term.index()].push(Evidence::defaulted(a));
        }
    }
    ConcreteSummary(out)
}

/// Which compatibility matrix applies to a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    /// Project license on the left, component license on the right.
    #[serde(rename = "PLvsCL")]
    PlVsCl,
    #[serde(rename = "CLvsCL")]
    ClVsCl,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::PlVsCl => "PLvsCL",
            Rule::ClVsCl => "CLvsCL",
        })
    }
}

impl Rule {
    pub fn pair_ok(self, left: Attitude, right: Attitude) -> Result<bool, CompatError> {
        match self {
            Rule::PlVsCl => pair_ok_pl_cl(left, right),
            Rule::ClVsCl => pair_ok_cl_cl(left, right),
        }
    }
}

fn concrete(a: Attitude) -> Result<Attitude, CompatError> {
    if a.is_concrete() {
        Ok(a)
    } else {
        Err(CompatError::UnknownAttitude(a))
    }
}

/// Whether a component license attitude is compatible with the project
/// license attitude toward the same term.
pub fn pair_ok_pl_cl(pl: Attitude, cl: Attitude) -> Result<bool, CompatError> {
    use Attitude::*;
    Ok(matches!(
        (concrete(pl)?, concrete(cl)?),
        (Can, Can) | (Cannot, Can) | (Cannot, Cannot) | (Must, Can) | (Must, Must)
    ))
}

/// Whether two component licenses can both be honored on a term.
pub fn pair_ok_cl_cl(a: Attitude, b: Attitude) -> Result<bool, CompatError> {
    use Attitude::*;
    Ok(!matches!((concrete(a)?, concrete(b)?), (Cannot, Must) | (Must, Cannot)))
}

/// Under which assumption about the conditions a conflict occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionCase {
    Unconditional,
    ConditionTrue,
    ConditionFalse,
    BothCases,
}

/// One license's side of a conflict.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConflictSide {
    pub license: LicenseRef,
    pub attitude: Attitude,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub defaulted: bool,
}

/// A term on which two licenses cannot both be honored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConflictRecord {
    pub term: TermId,
    pub left: ConflictSide,
    pub right: ConflictSide,
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_case: Option<ConditionCase>,
}

impl ConflictRecord {
    /// Involves an attitude filled in by the default policy.
    pub fn is_defaulted(&self) -> bool {
        self.left.defaulted || self.right.defaulted
    }
}

/// Incompatibility of a pair under both assumptions about one condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultPair {
    pub r_true: bool,
    pub r_false: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attitude::LicenseSummary;
    use crate::license::{LicenseKind, Origin, Role};

    fn lref() -> LicenseRef {
        LicenseRef {
            origin: Origin::path("LICENSE"),
            kind: LicenseKind::Declared,
            role: Role::Project,
            spdx_id: None,
        }
    }

    #[test]
    fn matrices() {
        use Attitude::*;
        assert!(!pair_ok_pl_cl(Can, Cannot).unwrap());
        assert!(pair_ok_pl_cl(Cannot, Cannot).unwrap());
        assert!(!pair_ok_pl_cl(Must, Cannot).unwrap());
        assert!(!pair_ok_cl_cl(Cannot, Must).unwrap());
        assert!(pair_ok_cl_cl(Can, Cannot).unwrap());
        assert!(pair_ok_cl_cl(Must, Must).unwrap());
        assert_eq!(pair_ok_pl_cl(Unknown, Can), Err(CompatError::UnknownAttitude(Unknown)));
    }

    #[test]
    fn fill_defaults() {
        let s = LicenseSummary::unknown(lref());
        let c = default_fill(&s, &DefaultPolicy::default());
        for t in TermId::all() {
            let want = if t.index() <= 10 { Attitude::Cannot } else { Attitude::Can };
            assert_eq!(c.attitude(t), want);
            assert!(c.is_defaulted(t));
        }
        let mut s = LicenseSummary::unknown(lref());
        s.attitudes[0] = Attitude::Can;
        let c = default_fill(&s, &DefaultPolicy::new(Attitude::Can, Attitude::Can).unwrap());
        assert_eq!(c.attitude(TermId::new(0).unwrap()), Attitude::Can);
        assert!(!c.is_defaulted(TermId::new(0).unwrap()));
        assert!(c.attitudes().iter().all(|a| *a == Attitude::Can));
        assert!(DefaultPolicy::new(Attitude::Must, Attitude::Can).is_err());
        // idempotent
        let again = default_fill(c.summary(), &DefaultPolicy::default());
        assert_eq!(again, c);
    }
}
