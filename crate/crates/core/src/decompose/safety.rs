use std::collections::BTreeSet;

use crate::ast::{AggregateExpr, BodyElement, Rule, Term, Variable, Vars};

/// Variables bound by `elements`, starting from `outer`: direct arguments
/// of positive atoms, then targets of `X = expr` once every variable of
/// `expr` is bound, to a fixpoint.
pub(crate) fn bound_vars(elements: &[BodyElement], outer: &BTreeSet<Variable>) -> BTreeSet<Variable> {
    let mut safe = outer.clone();
    for e in elements {
        if let BodyElement::Pos(a) = e {
            for t in &a.args {
                if let Term::Var(v) = t {
                    safe.insert(v.clone());
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for e in elements {
            if let BodyElement::Assign { target: Term::Var(v), expr } = e {
                if !safe.contains(v) && expr.vars().is_subset(&safe) {
                    safe.insert(v.clone());
                    changed = true;
                }
            }
        }
        if !changed {
            return safe;
        }
    }
}

/// Returns the unsafe variables of `rule`; empty iff the rule is safe.
///
/// Arithmetic inside atom arguments does not bind anything: `p(X+1)` in
/// a positive body does not make `X` safe.
pub fn check_safety(rule: &Rule) -> BTreeSet<Variable> {
    let safe = bound_vars(&rule.body, &BTreeSet::new());
    let globals = rule.global_vars();
    let mut unsafe_vars = BTreeSet::new();
    let mut need = |vs: BTreeSet<Variable>, safe: &BTreeSet<Variable>| {
        unsafe_vars.extend(vs.difference(safe).cloned());
    };
    for a in &rule.head {
        need(a.vars(), &safe);
    }
    for e in &rule.body {
        match e {
            BodyElement::Aggregate(agg) => {
                need(agg.guard_vars(), &safe);
                // global variables must be bound outside the aggregate
                need(agg.vars().intersection(&globals).cloned().collect(), &safe);
                check_aggregate(agg, &safe, &mut need);
            }
            other => need(other.vars(), &safe),
        }
    }
    if let Some(w) = &rule.weak {
        need(w.vars(), &safe);
    }
    unsafe_vars
}

fn check_aggregate(
    agg: &AggregateExpr,
    outer: &BTreeSet<Variable>,
    need: &mut dyn FnMut(BTreeSet<Variable>, &BTreeSet<Variable>),
) {
    for el in &agg.elements {
        let local = bound_vars(&el.condition, outer);
        let mut shallow: BTreeSet<Variable> = el.terms.iter().flat_map(|t| t.vars()).collect();
        for c in &el.condition {
            match c {
                BodyElement::Aggregate(inner) => {
                    shallow.extend(inner.guard_vars());
                    check_aggregate(inner, &local, need);
                }
                other => shallow.extend(other.vars()),
            }
        }
        need(shallow, &local);
    }
}
