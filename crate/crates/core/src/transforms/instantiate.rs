//! Instantiation of rules by given substitutions.

use std::collections::BTreeMap;

use super::TransformError;
use crate::rewriting::{check_rules_non_ambiguous, match_term, Atrs, Rule, Subst};

/// Substitutions per rule index. Rules without an entry are kept as they
/// are; an entry with no substitutions drops the rule.
pub type InstantiationPlan = BTreeMap<usize, Vec<Subst>>;

/// Replaces rule `i` by its instances under `plan[i]`.
///
/// Instances subsumed by a more general instance of the same rule are
/// dropped, since they would overlap with it. Fails if the result is
/// ambiguous.
pub fn instantiate(a: &Atrs, plan: &InstantiationPlan) -> Result<Atrs, TransformError> {
    let mut rules = Vec::new();
    for (i, r) in a.rules.iter().enumerate() {
        let Some(substs) = plan.get(&i) else {
            rules.push(r.clone());
            continue;
        };
        let lhs_vars = r.lhs.var_set();
        let mut instances: Vec<Rule> = Vec::new();
        for s in substs {
            if let Some(v) = s.domain().into_iter().find(|v| !lhs_vars.contains(v)) {
                return Err(TransformError::ForeignPlanVariable { rule: i, var: v.to_string() });
            }
            let inst = Rule::new(r.lhs.apply(s), r.rhs.apply(s))
                .expect("instances of a rule are rules")
                .canonical();
            instances.push(inst);
        }
        let instances = Atrs::dedup_rules(instances);
        for (k, inst) in instances.iter().enumerate() {
            let subsumed = instances
                .iter()
                .enumerate()
                .any(|(j, other)| j != k && match_term(&other.lhs, &inst.lhs).is_some() && match_term(&inst.lhs, &other.lhs).is_none());
            if !subsumed {
                rules.push(inst.clone());
            }
        }
    }
    let report = check_rules_non_ambiguous(&rules);
    if !report.non_ambiguous {
        return Err(TransformError::AmbiguityIntroduced { overlaps: report.overlaps });
    }
    Ok(a.with_rules(rules))
}
