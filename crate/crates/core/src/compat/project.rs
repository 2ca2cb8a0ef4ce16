use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::detect::{detect, Verdict};
use super::{default_fill, ConcreteSummary, ConflictRecord, DefaultPolicy, Rule};
use crate::attitude::LicenseSummary;
use crate::exec::Execution;
use crate::license::Role;

/// Result of checking every license pair of a project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectReport {
    pub project: PathBuf,
    pub pairs_checked: usize,
    pub conflicts: Vec<ConflictRecord>,
    pub incompatible: bool,
    /// Default-filled summaries, sorted by origin.
    pub summaries: Vec<ConcreteSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Checks the project license against every component license and every
/// pair of component licenses with each other. Without a project license
/// only component pairs are checked. Several project licenses are compared
/// with each other under the component rule.
pub fn analyze_project(
    project: &Path,
    summaries: &[LicenseSummary],
    policy: &DefaultPolicy,
    exec: Execution,
) -> ProjectReport {
    let mut filled: Vec<ConcreteSummary> = summaries.iter().map(|s| default_fill(s, policy)).collect();
    filled.sort_by(|a, b| a.license().cmp(b.license()));

    let (pls, cls): (Vec<usize>, Vec<usize>) = (0..filled.len()).partition(|&i| filled[i].license().role == Role::Project);
    let mut warnings = Vec::new();
    let mut pairs: Vec<(usize, usize, Rule)> = Vec::new();
    for &p in &pls {
        pairs.extend(cls.iter().map(|&c| (p, c, Rule::PlVsCl)));
    }
    for (k, &a) in pls.iter().enumerate() {
        for &b in &pls[k + 1..] {
            warnings.push(format!(
                "several project licenses: {} and {} compared as component licenses",
                filled[a].license().origin,
                filled[b].license().origin
            ));
            pairs.push((a, b, Rule::ClVsCl));
        }
    }
    for (k, &a) in cls.iter().enumerate() {
        pairs.extend(cls[k + 1..].iter().map(|&b| (a, b, Rule::ClVsCl)));
    }

    let verdicts: Vec<Verdict> = exec.map(&pairs, |&(a, b, rule)| detect(&filled[a], &filled[b], rule, policy));
    let mut conflicts: Vec<ConflictRecord> = Vec::new();
    let mut incompatible = false;
    for v in verdicts {
        if v.incompatible {
            incompatible = true;
            conflicts.extend(v.conflicts);
        }
    }
    conflicts.sort_by(|x, y| {
        (&x.left.license.origin, &x.right.license.origin, x.term)
            .cmp(&(&y.left.license.origin, &y.right.license.origin, y.term))
            .then_with(|| x.cmp(y))
    });
    conflicts.dedup();
    ProjectReport {
        project: project.to_path_buf(),
        pairs_checked: pairs.len(),
        incompatible: incompatible && !conflicts.is_empty(),
        conflicts,
        summaries: filled,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attitude::LicenseRef;
    use crate::license::{LicenseKind, Origin};
    use crate::terms::Attitude;

    fn s(name: &str, role: Role, set: &[(usize, Attitude)]) -> LicenseSummary {
        let mut s = LicenseSummary::unknown(LicenseRef {
            origin: Origin::path(name),
            kind: LicenseKind::Declared,
            role,
            spdx_id: None,
        });
        for &(i, a) in set {
            s.attitudes[i] = a;
        }
        s
    }

    #[test]
    fn pair_counts() {
        let p = Path::new("proj");
        let pol = DefaultPolicy::default();
        let three = [s("a", Role::Project, &[]), s("b", Role::Component, &[]), s("c", Role::Component, &[])];
        assert_eq!(analyze_project(p, &three, &pol, Execution::Sequential).pairs_checked, 3);
        let cls = [s("a", Role::Component, &[]), s("b", Role::Component, &[]), s("c", Role::Component, &[])];
        assert_eq!(analyze_project(p, &cls, &pol, Execution::Sequential).pairs_checked, 3);
        let r = analyze_project(p, &cls[..1], &pol, Execution::Sequential);
        assert_eq!((r.pairs_checked, r.incompatible), (0, false));
    }

    #[test]
    fn permutation_invariant() {
        let p = Path::new("proj");
        let pol = DefaultPolicy::default();
        let mut v = vec![
            s("LICENSE", Role::Project, &[(0, Attitude::Can)]),
            s("x/LICENSE", Role::Component, &[(0, Attitude::Cannot)]),
            s("y/LICENSE", Role::Component, &[(17, Attitude::Must)]),
            s("z/LICENSE", Role::Component, &[(17, Attitude::Cannot)]),
        ];
        let a = analyze_project(p, &v, &pol, Execution::Parallel);
        v.reverse();
        let b = analyze_project(p, &v, &pol, Execution::Sequential);
        assert_eq!(a, b);
        assert!(a.incompatible);
        // Distribute against all three components, Give Credit against y and
        // z, and y against z
        assert_eq!(a.conflicts.len(), 6);
    }
}
