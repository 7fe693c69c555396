use std::collections::BTreeSet;

use super::namer::FreshNamer;
use crate::ast::{Atom, BodyElement, Rule, Term, Variable, Vars, WeakAnnotation};

/// Splits `:~ B. [k@l, t]` into `temp(k, l, t) :- B.` and
/// `:~ temp(k, l, t). [k@l, t]`.
///
/// Compound terms in the annotation are replaced by fresh variables in
/// the second rule so that its body atom stays safe.
///
/// # Panics
/// If `rule` is not a weak constraint.
pub fn rewrite_weak_constraint(rule: &Rule, namer: &mut FreshNamer) -> (Rule, Rule) {
    let weak = rule.weak.as_ref().expect("rewrite_weak_constraint needs a weak constraint");
    let name = namer.temp();
    let mut args = vec![weak.weight.clone(), weak.level.clone()];
    args.extend(weak.terms.iter().cloned());

    let taken: BTreeSet<Variable> = rule.vars();
    let mut next = 0;
    let plain: Vec<Term> = args
        .iter()
        .map(|t| {
            if t.is_simple() {
                return t.clone();
            }
            loop {
                let v = Variable::new(format!("V{next}"));
                next += 1;
                if !taken.contains(&v) {
                    return Term::Var(v);
                }
            }
        })
        .collect();

    let temp_rule = Rule::new(vec![Atom::new(name.clone(), args)], rule.body.clone());
    let weak_rule = Rule {
        head: Vec::new(),
        body: vec![BodyElement::Pos(Atom::new(name, plain.clone()))],
        weak: Some(WeakAnnotation {
            weight: plain[0].clone(),
            level: plain[1].clone(),
            terms: plain[2..].to_vec(),
        }),
    };
    (temp_rule, weak_rule)
}
