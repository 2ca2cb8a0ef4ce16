use super::detect::{attitudes_of, conditions};
use super::{ConcreteSummary, DefaultPolicy, Rule};
use crate::terms::{Attitude, TermId};

/// Reference decision procedure for [`super::detect`]: tries every truth
/// assignment of all conditions at once and checks all 23 terms under each.
/// Exponential in the number of conditions; meant for testing.
pub fn detect_brute_force(l1: &ConcreteSummary, l2: &ConcreteSummary, rule: Rule, policy: &DefaultPolicy) -> bool {
    let conds = conditions(l1, l2);
    let base = (attitudes_of(l1), attitudes_of(l2));
    let conflicting = |mask: u64| {
        let (mut a, mut b) = base;
        // false assumptions first, then true ones
        for k in (0..conds.len()).filter(|k| mask & (1 << k) != 0) {
            let c = conds[k];
            let side = if c.owner == super::Owner::Left { &mut a } else { &mut b };
            side[c.consequent.index()] = Attitude::Cannot;
            side[c.antecedent.index()] = policy.for_term(c.antecedent);
        }
        for k in (0..conds.len()).filter(|k| mask & (1 << k) == 0) {
            let c = conds[k];
            let side = if c.owner == super::Owner::Left { &mut a } else { &mut b };
            side[c.antecedent.index()] = Attitude::Must;
        }
        TermId::all().any(|t| !rule.pair_ok(a[t.index()], b[t.index()]).expect("concrete"))
    };
    let mut outcomes = (0..1u64 << conds.len()).map(conflicting);
    match rule {
        Rule::ClVsCl => outcomes.all(|x| x),
        Rule::PlVsCl => outcomes.any(|x| x),
    }
}
