use std::collections::{BTreeMap, BTreeSet};

use super::eval::{compare, eval, EvalError, Subst};
use super::{Diagnostics, GroundAggregate, GroundElement, GroundProgram, GroundRule, Limits, OracleError, WeakTuple};
use crate::ast::{AggregateFunction, Atom, BodyElement, Constant, GroundAtom, Program, Rule, Term, Vars};

/// Possible atoms, indexed by signature for matching.
#[derive(Default)]
struct Index {
    set: BTreeSet<GroundAtom>,
    by_sig: BTreeMap<(String, usize), Vec<Vec<Constant>>>,
}

impl Index {
    fn insert(&mut self, a: GroundAtom) -> bool {
        if self.set.contains(&a) {
            return false;
        }
        self.by_sig.entry(a.signature()).or_default().push(a.args.clone());
        self.set.insert(a);
        true
    }

    fn tuples(&self, a: &Atom) -> &[Vec<Constant>] {
        self.by_sig
            .get(&(a.predicate.clone(), a.args.len()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

pub(super) fn ground(program: &Program, limits: &Limits) -> Result<GroundProgram, OracleError> {
    check_supported(program, limits)?;
    let mut index = Index::default();
    let mut diag = Diagnostics::default();

    // over-approximate the atoms that can ever be true: negation and
    // aggregates are ignored
    loop {
        let mut grew = false;
        for rule in &program.rules {
            let mut heads = Vec::new();
            instances(&rule.body, &index, &mut Diagnostics::default(), &mut |s| {
                if let Some(g) = instantiate(rule, s, &index, false, &mut Diagnostics::default()) {
                    heads.extend(g.head);
                }
            });
            for h in heads {
                grew |= index.insert(h);
            }
            if index.set.len() > limits.max_possible_atoms {
                return Err(OracleError::TooManyAtoms {
                    count: index.set.len(),
                    cap: limits.max_possible_atoms,
                });
            }
        }
        if !grew {
            break;
        }
    }

    let mut rules = Vec::new();
    for rule in &program.rules {
        let mut err = None;
        let mut failed = Diagnostics::default();
        instances(&rule.body, &index, &mut failed, &mut |s| {
            if err.is_some() {
                return;
            }
            if let Some(mut g) = instantiate(rule, s, &index, true, &mut diag) {
                g.fact = rule.is_fact();
                rules.push(g);
            }
            if rules.len() > limits.max_ground_rules {
                err = Some(OracleError::TooManyGroundRules { cap: limits.max_ground_rules });
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        diag.merge(&failed);
        if let Some(e) = diag.sum_error.take() {
            return Err(e);
        }
    }
    Ok(GroundProgram {
        rules,
        diagnostics: diag,
    })
}

fn check_supported(program: &Program, limits: &Limits) -> Result<(), OracleError> {
    // dependency edges head predicate -> body predicate
    let mut deps: BTreeMap<(String, usize), BTreeSet<(String, usize)>> = BTreeMap::new();
    for (i, rule) in program.rules.iter().enumerate() {
        let n = rule.vars().len();
        if n > limits.max_rule_vars {
            return Err(OracleError::TooManyVariables {
                rule: i,
                count: n,
                cap: limits.max_rule_vars,
            });
        }
        let mut body = BTreeSet::new();
        for e in &rule.body {
            if let BodyElement::Aggregate(agg) = e {
                if agg.has_nested_aggregate() {
                    return Err(OracleError::NestedAggregate { rule: i });
                }
            }
            let r = Rule::new(Vec::new(), vec![e.clone()]);
            r.visit_atoms(&mut |a| {
                body.insert(a.signature());
            });
        }
        for h in &rule.head {
            deps.entry(h.signature()).or_default().extend(body.iter().cloned());
        }
    }
    let reaches = |from: &(String, usize), targets: &BTreeSet<(String, usize)>| {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.clone()];
        while let Some(p) = stack.pop() {
            if targets.contains(&p) {
                return true;
            }
            if seen.insert(p.clone()) {
                if let Some(next) = deps.get(&p) {
                    stack.extend(next.iter().cloned());
                }
            }
        }
        false
    };
    for (i, rule) in program.rules.iter().enumerate() {
        let heads: BTreeSet<(String, usize)> = rule.head.iter().map(Atom::signature).collect();
        for e in &rule.body {
            if let BodyElement::Aggregate(agg) = e {
                for el in &agg.elements {
                    for c in &el.condition {
                        if let BodyElement::Pos(a) | BodyElement::Neg(a) = c {
                            if reaches(&a.signature(), &heads) {
                                return Err(OracleError::RecursiveAggregate { rule: i });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Calls `out` with every substitution that matches the positive atoms
/// of `body` against `index` and satisfies the arithmetic bindings.
fn instances(body: &[BodyElement], index: &Index, diag: &mut Diagnostics, out: &mut dyn FnMut(&Subst)) {
    let mut done = vec![false; body.len()];
    search(body, index, Subst::new(), &mut done, diag, out);
}

fn search(
    body: &[BodyElement],
    index: &Index,
    mut s: Subst,
    done: &mut Vec<bool>,
    diag: &mut Diagnostics,
    out: &mut dyn FnMut(&Subst),
) {
    // bind assignment targets whose expressions are ready
    let mut newly = Vec::new();
    loop {
        let mut changed = false;
        for (i, e) in body.iter().enumerate() {
            if done[i] {
                continue;
            }
            if let BodyElement::Assign { target: Term::Var(v), expr } = e {
                if s.contains_key(v) || !expr.vars().iter().all(|x| s.contains_key(x)) {
                    continue;
                }
                match eval(expr, &s) {
                    Ok(c) => {
                        s.insert(v.clone(), c);
                        done[i] = true;
                        newly.push(i);
                        changed = true;
                    }
                    Err(e) => {
                        diag.record(e);
                        for j in newly {
                            done[j] = false;
                        }
                        return;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let next = (0..body.len()).find(|&i| !done[i] && matches!(body[i], BodyElement::Pos(_)));
    match next {
        None => out(&s),
        Some(i) => {
            let BodyElement::Pos(atom) = &body[i] else { unreachable!() };
            done[i] = true;
            for tuple in index.tuples(atom) {
                if let Some(s2) = unify(atom, tuple, &s) {
                    search(body, index, s2, done, diag, out);
                }
            }
            done[i] = false;
        }
    }
    for j in newly {
        done[j] = false;
    }
}

fn unify(atom: &Atom, tuple: &[Constant], s: &Subst) -> Option<Subst> {
    let mut s = s.clone();
    for (t, c) in atom.args.iter().zip(tuple) {
        match t {
            Term::Const(k) if k != c => return None,
            Term::Var(v) => match s.get(v) {
                Some(bound) if bound != c => return None,
                Some(_) => {}
                None => {
                    s.insert(v.clone(), c.clone());
                }
            },
            // compound arguments are checked once the instance is built
            _ => {}
        }
    }
    Some(s)
}

fn ground_atom(a: &Atom, s: &Subst) -> Result<GroundAtom, EvalError> {
    let args = a.args.iter().map(|t| eval(t, s)).collect::<Result<Vec<_>, _>>()?;
    Ok(GroundAtom::new(a.predicate.clone(), args))
}

/// Builds the ground instance of `rule` under `s`, or `None` if the
/// instance is dropped (false builtin, impossible positive atom, or an
/// arithmetic failure, which is tallied).
fn instantiate(rule: &Rule, s: &Subst, index: &Index, with_aggregates: bool, diag: &mut Diagnostics) -> Option<GroundRule> {
    let fail = |e: EvalError, diag: &mut Diagnostics| {
        diag.record(e);
        None
    };
    let mut g = GroundRule::default();
    for a in &rule.head {
        match ground_atom(a, s) {
            Ok(x) => g.head.push(x),
            Err(e) => return fail(e, diag),
        }
    }
    for e in &rule.body {
        match e {
            BodyElement::Pos(a) => match ground_atom(a, s) {
                Ok(x) if index.set.contains(&x) => g.pos.push(x),
                Ok(_) => return None,
                Err(e) => return fail(e, diag),
            },
            BodyElement::Neg(a) => match ground_atom(a, s) {
                Ok(x) => {
                    if index.set.contains(&x) || !with_aggregates {
                        g.neg.push(x);
                    }
                }
                Err(e) => return fail(e, diag),
            },
            BodyElement::Comparison { relation, lhs, rhs } => match compare(*relation, lhs, rhs, s) {
                Ok(true) => {}
                Ok(false) => return None,
                Err(e) => return fail(e, diag),
            },
            BodyElement::Assign { target, expr } => match compare(crate::ast::Relation::Eq, target, expr, s) {
                Ok(true) => {}
                Ok(false) => return None,
                Err(e) => return fail(e, diag),
            },
            BodyElement::Aggregate(agg) => {
                if !with_aggregates {
                    continue;
                }
                let guard = match eval(&agg.guard, s) {
                    Ok(c) => c,
                    Err(e) => return fail(e, diag),
                };
                let mut elements = BTreeSet::new();
                let mut failed = Diagnostics::default();
                for el in &agg.elements {
                    let mut done = vec![false; el.condition.len()];
                    search(&el.condition, index, s.clone(), &mut done, &mut failed, &mut |ls| {
                        if let Some(ge) = ground_element(&el.terms, &el.condition, ls, index, diag) {
                            if agg.function == AggregateFunction::Sum
                                && ge.tuple.first().and_then(Constant::as_int).is_none()
                                && diag.sum_error.is_none()
                            {
                                diag.sum_error = Some(OracleError::NonIntegerSum);
                            }
                            elements.insert(ge);
                        }
                    });
                }
                diag.merge(&failed);
                g.aggregates.push(GroundAggregate {
                    guard,
                    relation: agg.relation,
                    function: agg.function,
                    elements: elements.into_iter().collect(),
                });
            }
        }
    }
    if let Some(w) = &rule.weak {
        let mut get = |t: &Term| match eval(t, s) {
            Ok(c) => Ok(c),
            Err(e) => Err(e),
        };
        let weight = get(&w.weight);
        let level = get(&w.level);
        let terms: Result<Vec<Constant>, EvalError> = w.terms.iter().map(&mut get).collect();
        match (weight, level, terms) {
            (Ok(k), Ok(l), Ok(terms)) => match (k.as_int(), l.as_int()) {
                (Some(weight), Some(level)) => g.weak = Some(WeakTuple { weight, level, terms }),
                _ => return fail(EvalError::NonInteger, diag),
            },
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return fail(e, diag),
        }
    }
    Some(g)
}

fn ground_element(terms: &[Term], condition: &[BodyElement], s: &Subst, index: &Index, diag: &mut Diagnostics) -> Option<GroundElement> {
    let mut tuple = Vec::with_capacity(terms.len());
    for t in terms {
        match eval(t, s) {
            Ok(c) => tuple.push(c),
            Err(e) => {
                diag.record(e);
                return None;
            }
        }
    }
    let mut ge = GroundElement {
        tuple,
        pos: Vec::new(),
        neg: Vec::new(),
    };
    for c in condition {
        let ok = match c {
            BodyElement::Pos(a) => match ground_atom(a, s) {
                Ok(x) if index.set.contains(&x) => {
                    ge.pos.push(x);
                    Ok(true)
                }
                Ok(_) => Ok(false),
                Err(e) => Err(e),
            },
            BodyElement::Neg(a) => ground_atom(a, s).map(|x| {
                if index.set.contains(&x) {
                    ge.neg.push(x);
                }
                true
            }),
            BodyElement::Comparison { relation, lhs, rhs } => compare(*relation, lhs, rhs, s),
            BodyElement::Assign { target, expr } => compare(crate::ast::Relation::Eq, target, expr, s),
            BodyElement::Aggregate(_) => unreachable!("nested aggregates are rejected"),
        };
        match ok {
            Ok(true) => {}
            Ok(false) => return None,
            Err(e) => {
                diag.record(e);
                return None;
            }
        }
    }
    Some(ge)
}
