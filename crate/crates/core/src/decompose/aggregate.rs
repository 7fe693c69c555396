use std::collections::BTreeSet;

use super::domain::domain_atom;
use super::namer::FreshNamer;
use super::safety::bound_vars;
use super::DecomposeError;
use crate::ast::{AggregateElement, Atom, BodyElement, Rule, Term, Variable, Vars};

/// Result of splitting the elements of one aggregate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateRewrite {
    /// The input rule with the aggregate's conditions shortened.
    pub rule: Rule,
    /// One `temp(Z) :- ...` rule per split element.
    pub temp_rules: Vec<Rule>,
    /// Domain rules for variables the temporary rules cannot bind alone.
    pub domain_rules: Vec<Rule>,
}

/// Splits the condition of each element of the aggregate at
/// `body[index]` into the part touching the rest of the rule and the
/// part that does not, moving the latter into a temporary rule.
///
/// Returns `Ok(None)` when no element has two or more detachable
/// condition elements.
pub fn rewrite_aggregate(rule: &Rule, index: usize, namer: &mut FreshNamer) -> Result<Option<AggregateRewrite>, DecomposeError> {
    let BodyElement::Aggregate(agg) = &rule.body[index] else {
        panic!("body element {index} is not an aggregate");
    };
    if agg.has_nested_aggregate() {
        return Err(DecomposeError::Unsupported("nested aggregates cannot be decomposed".into()));
    }
    let outside = rule.global_vars();
    let outer_body: Vec<BodyElement> = rule.body.iter().filter(|e| !e.is_aggregate()).cloned().collect();

    let mut new_agg = agg.clone();
    let mut temp_rules = Vec::new();
    let mut domain_rules = Vec::new();
    for el in &mut new_agg.elements {
        let (psi, psi_bar): (Vec<BodyElement>, Vec<BodyElement>) =
            el.condition.iter().cloned().partition(|c| !c.vars().is_disjoint(&outside));
        if psi_bar.len() <= 1 {
            continue;
        }
        let mut linked: BTreeSet<Variable> = psi.iter().flat_map(|c| c.vars()).collect();
        for t in &el.terms {
            linked.extend(t.vars());
        }
        let z = ordered_vars(&psi_bar).into_iter().filter(|v| linked.contains(v)).collect::<Vec<_>>();

        let name = namer.temp();
        let head = Atom::new(name.clone(), z.iter().cloned().map(Term::Var).collect());
        let mut body = psi_bar.clone();
        let safe = bound_vars(&psi_bar, &BTreeSet::new());
        let needed: Vec<Variable> = ordered_vars(&psi_bar)
            .into_iter()
            .filter(|v| !safe.contains(v))
            .collect();
        if !needed.is_empty() {
            // domains of local variables come from the whole condition plus the outer body
            let mut scope_body = el.condition.clone();
            scope_body.extend(outer_body.iter().cloned());
            let scope = Rule::new(Vec::new(), scope_body);
            for v in needed {
                body.push(BodyElement::Pos(domain_atom(&v, &scope, namer, &mut domain_rules)?));
            }
        }
        temp_rules.push(Rule::new(vec![head.clone()], body));

        let mut condition = psi;
        condition.push(BodyElement::Pos(head));
        *el = AggregateElement {
            terms: el.terms.clone(),
            condition,
        };
    }
    if temp_rules.is_empty() {
        return Ok(None);
    }
    let mut out = rule.clone();
    out.body[index] = BodyElement::Aggregate(new_agg);
    Ok(Some(AggregateRewrite {
        rule: out,
        temp_rules,
        domain_rules,
    }))
}

fn ordered_vars(elements: &[BodyElement]) -> Vec<Variable> {
    let mut out: Vec<Variable> = Vec::new();
    for e in elements {
        let r = Rule::new(Vec::new(), vec![e.clone()]);
        for v in r.ordered_global_vars() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}
