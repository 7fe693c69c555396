use std::collections::{BTreeMap, BTreeSet};

use super::{aggregate_holds, GroundAggregate, GroundProgram, Limits, OracleError};
use crate::ast::{Constant, GroundAtom, Interpretation};

struct Elem<'a> {
    tuple: &'a Vec<Constant>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

struct Agg<'a> {
    src: &'a GroundAggregate,
    elements: Vec<Elem<'a>>,
}

impl Agg<'_> {
    fn holds(&self, truth: &[bool]) -> bool {
        let tuples: BTreeSet<&Vec<Constant>> = self
            .elements
            .iter()
            .filter(|e| e.pos.iter().all(|&a| truth[a]) && !e.neg.iter().any(|&a| truth[a]))
            .map(|e| e.tuple)
            .collect();
        aggregate_holds(self.src.function, self.src.relation, &self.src.guard, tuples.into_iter())
    }

    fn determined(&self, t: &[bool], u: &[bool]) -> bool {
        self.elements
            .iter()
            .all(|e| e.pos.iter().chain(&e.neg).all(|&a| t[a] || !u[a]))
    }

    fn certain(&self, t: &[bool], u: &[bool]) -> bool {
        self.determined(t, u) && self.holds(t)
    }

    fn possible(&self, t: &[bool], u: &[bool]) -> bool {
        !self.determined(t, u) || self.holds(t)
    }
}

struct CRule<'a> {
    head: Vec<usize>,
    pos: Vec<usize>,
    neg: Vec<usize>,
    aggs: Vec<Agg<'a>>,
}

impl CRule<'_> {
    fn body_holds(&self, truth: &[bool]) -> bool {
        self.pos.iter().all(|&a| truth[a]) && !self.neg.iter().any(|&a| truth[a]) && self.aggs.iter().all(|g| g.holds(truth))
    }

    fn satisfied(&self, truth: &[bool]) -> bool {
        !self.body_holds(truth) || self.head.iter().any(|&a| truth[a])
    }

    /// Satisfaction of the reduct rule under `j`, given that the rule
    /// survived the reduct with respect to some model.
    fn reduct_satisfied(&self, j: &[bool]) -> bool {
        !self.pos.iter().all(|&a| j[a]) || self.head.iter().any(|&a| j[a])
    }

    fn in_reduct(&self, i: &[bool]) -> bool {
        !self.neg.iter().any(|&a| i[a]) && self.aggs.iter().all(|g| g.holds(i))
    }
}

struct Compiled<'a> {
    atoms: Vec<GroundAtom>,
    rules: Vec<CRule<'a>>,
}

fn compile(g: &GroundProgram) -> Compiled<'_> {
    let mut ids: BTreeMap<GroundAtom, usize> = BTreeMap::new();
    let mut atoms = Vec::new();
    let mut rules = Vec::new();
    for r in g.rules.iter().filter(|r| r.weak.is_none()) {
        let mut map = |v: &Vec<GroundAtom>| -> Vec<usize> {
            v.iter()
                .map(|a| {
                    *ids.entry(a.clone()).or_insert_with(|| {
                        atoms.push(a.clone());
                        atoms.len() - 1
                    })
                })
                .collect()
        };
        let head = map(&r.head);
        let pos = map(&r.pos);
        let neg = map(&r.neg);
        let aggs = r
            .aggregates
            .iter()
            .map(|src| Agg {
                src,
                elements: src
                    .elements
                    .iter()
                    .map(|e| Elem {
                        tuple: &e.tuple,
                        pos: map(&e.pos),
                        neg: map(&e.neg),
                    })
                    .collect(),
            })
            .collect();
        rules.push(CRule { head, pos, neg, aggs });
    }
    Compiled { atoms, rules }
}

impl Compiled<'_> {
    fn n(&self) -> usize {
        self.atoms.len()
    }

    fn to_interpretation(&self, truth: &[bool]) -> Interpretation {
        truth
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.atoms[i].clone())
            .collect()
    }

    fn is_disjunctive(&self) -> bool {
        self.rules.iter().any(|r| r.head.len() > 1)
    }

    fn is_model(&self, truth: &[bool]) -> bool {
        self.rules.iter().all(|r| r.satisfied(truth))
    }

    /// Bounds `t ⊆ M ⊆ u` holding for every stable model `M`, by
    /// alternating the certain and the possible consequences.
    fn bounds(&self) -> (Vec<bool>, Vec<bool>) {
        let n = self.n();
        let mut t = vec![false; n];
        let mut u = vec![true; n];
        loop {
            let t2 = self.lfp(|r, d| {
                r.head.len() == 1
                    && r.pos.iter().all(|&a| d[a])
                    && r.neg.iter().all(|&a| !u[a])
                    && r.aggs.iter().all(|g| g.certain(&t, &u))
            });
            let u2 = self.lfp(|r, d| {
                r.pos.iter().all(|&a| d[a])
                    && r.neg.iter().all(|&a| !t2[a])
                    && r.aggs.iter().all(|g| g.possible(&t2, &u))
            });
            if t2 == t && u2 == u {
                return (t, u);
            }
            t = t2;
            u = u2;
        }
    }

    /// Closes the empty set under the heads of the rules that `fires`.
    fn lfp(&self, fires: impl Fn(&CRule<'_>, &[bool]) -> bool) -> Vec<bool> {
        let mut d = vec![false; self.n()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if r.head.iter().any(|&a| !d[a]) && fires(r, &d) {
                    for &a in &r.head {
                        if !d[a] {
                            d[a] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return d;
            }
        }
    }

    /// Whether no proper subset of `i` containing `floor` is a model of
    /// the reduct of the program with respect to `i`.
    fn minimal(&self, i: &[bool], free: &[usize]) -> bool {
        let reduct: Vec<&CRule<'_>> = self.rules.iter().filter(|r| r.in_reduct(i)).collect();
        let set: Vec<usize> = free.iter().copied().filter(|&a| i[a]).collect();
        let full = (1u64 << set.len()) - 1;
        let mut j = i.to_vec();
        for mask in 0..full {
            for (k, &a) in set.iter().enumerate() {
                j[a] = mask >> k & 1 == 1;
            }
            if reduct.iter().all(|r| r.reduct_satisfied(&j)) {
                return false;
            }
        }
        true
    }
}

fn guess_cap(count: usize, limits: &Limits) -> Result<(), OracleError> {
    if count > limits.max_guess_atoms || count >= 63 {
        return Err(OracleError::TooManyGuessAtoms {
            count,
            cap: limits.max_guess_atoms,
        });
    }
    Ok(())
}

pub(super) fn stable_models(g: &GroundProgram, limits: &Limits) -> Result<Vec<Interpretation>, OracleError> {
    let c = compile(g);
    let (t, u) = c.bounds();
    let mut out = BTreeSet::new();
    if c.is_disjunctive() {
        let free: Vec<usize> = (0..c.n()).filter(|&a| u[a] && !t[a]).collect();
        guess_cap(free.len(), limits)?;
        let mut i = t.clone();
        for mask in 0..1u64 << free.len() {
            for (k, &a) in free.iter().enumerate() {
                i[a] = mask >> k & 1 == 1;
            }
            if c.is_model(&i) && c.minimal(&i, &free) {
                out.insert(c.to_interpretation(&i));
            }
        }
        return Ok(out.into_iter().collect());
    }

    // Normal program: guess the atoms that occur under negation or in
    // an aggregate, derive the rest, and keep the guesses that reproduce
    // themselves.
    let mut watched = vec![false; c.n()];
    for r in &c.rules {
        for &a in &r.neg {
            watched[a] = true;
        }
        for g in &r.aggs {
            for e in &g.elements {
                for &a in e.pos.iter().chain(&e.neg) {
                    watched[a] = true;
                }
            }
        }
    }
    let free: Vec<usize> = (0..c.n()).filter(|&a| watched[a] && u[a] && !t[a]).collect();
    guess_cap(free.len(), limits)?;
    let mut guess = t.clone();
    for mask in 0..1u64 << free.len() {
        for (k, &a) in free.iter().enumerate() {
            guess[a] = mask >> k & 1 == 1;
        }
        let m = c.lfp(|r, d| {
            r.head.len() == 1 && r.pos.iter().all(|&a| d[a]) && r.in_reduct(&guess)
        });
        let consistent = (0..c.n()).all(|a| !watched[a] || m[a] == guess[a]);
        if consistent && c.is_model(&m) {
            out.insert(c.to_interpretation(&m));
        }
    }
    Ok(out.into_iter().collect())
}

pub(super) fn exhaustive(g: &GroundProgram, limits: &Limits) -> Result<Vec<Interpretation>, OracleError> {
    let c = compile(g);
    let all: Vec<usize> = (0..c.n()).collect();
    guess_cap(all.len(), limits)?;
    let mut out = Vec::new();
    let mut i = vec![false; c.n()];
    for mask in 0..1u64 << all.len() {
        for &a in &all {
            i[a] = mask >> a & 1 == 1;
        }
        if c.is_model(&i) && c.minimal(&i, &all) {
            out.push(c.to_interpretation(&i));
        }
    }
    out.sort();
    Ok(out)
}
