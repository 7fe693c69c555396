use std::collections::{BTreeSet, VecDeque};

use super::namer::FreshNamer;
use super::DecomposeError;
use crate::ast::{Atom, BodyElement, Rule, Term, Variable, Vars};

/// Picks body elements of `rule` that together bind `x`.
///
/// Works through a queue of variables still to bind, starting with `x`.
/// A variable is bound by the first positive atom (in body order) that
/// has it as a direct argument; failing that, by the smallest arithmetic
/// binding `S = expr` (fewest variables, then body order), whose
/// variables join the queue.
pub(crate) fn domain_body(x: &Variable, rule: &Rule) -> Result<Vec<BodyElement>, DecomposeError> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut queue = VecDeque::from([x.clone()]);
    let mut seen: BTreeSet<Variable> = BTreeSet::from([x.clone()]);
    while let Some(s) = queue.pop_front() {
        let direct = |e: &BodyElement| match e {
            BodyElement::Pos(a) => a.args.iter().any(|t| t.as_var() == Some(&s)),
            _ => false,
        };
        if chosen.iter().any(|&i| direct(&rule.body[i])) {
            continue;
        }
        if let Some(i) = rule.body.iter().position(direct) {
            chosen.push(i);
            continue;
        }
        let binding = rule
            .body
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e {
                BodyElement::Assign { target: Term::Var(v), expr } if *v == s => Some((expr.vars().len(), i)),
                _ => None,
            })
            .min();
        let Some((_, i)) = binding else {
            return Err(DecomposeError::Unsafe(s.to_string()));
        };
        if !chosen.contains(&i) {
            chosen.push(i);
        }
        for v in rule.body[i].vars() {
            if seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    Ok(chosen.into_iter().map(|i| rule.body[i].clone()).collect())
}

/// Builds `dom(X) :- A` where `A` is chosen by [`domain_body`].
pub fn synthesize_domain_rule(x: &Variable, rule: &Rule, namer: &mut FreshNamer) -> Result<Rule, DecomposeError> {
    let body = domain_body(x, rule)?;
    let name = namer.dom(x);
    Ok(Rule::new(vec![Atom::new(name, vec![Term::Var(x.clone())])], body))
}

/// Returns the atom `dom(X)` for `x`, appending its defining rule to
/// `out` unless an identical one was emitted before.
pub(crate) fn domain_atom(x: &Variable, rule: &Rule, namer: &mut FreshNamer, out: &mut Vec<Rule>) -> Result<Atom, DecomposeError> {
    let body = domain_body(x, rule)?;
    let name = match namer.known_domain(x, &body) {
        Some(n) => n.clone(),
        None => {
            let n = namer.dom(x);
            namer.remember_domain(x, &body, n.clone());
            out.push(Rule::new(vec![Atom::new(n.clone(), vec![Term::Var(x.clone())])], body));
            n
        }
    };
    Ok(Atom::new(name, vec![Term::Var(x.clone())]))
}
