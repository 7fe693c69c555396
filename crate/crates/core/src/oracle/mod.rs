//! Reference semantics for small programs: a grounder, a brute-force
//! stable-model enumerator with aggregates and weak constraints, and an
//! equivalence check between a program and its rewriting.
//!
//! Everything here is exponential and guarded by [`Limits`].

mod eval;
mod ground;
mod solve;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ast::{AggregateFunction, Constant, GroundAtom, Interpretation, Program, Relation};

pub use eval::EvalError;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("rule {rule} has {count} variables (limit {cap})")]
    TooManyVariables { rule: usize, count: usize, cap: usize },
    #[error("{count} possible ground atoms (limit {cap})")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("more than {cap} ground rules")]
    TooManyGroundRules { cap: usize },
    #[error("{count} undetermined atoms to enumerate (limit {cap})")]
    TooManyGuessAtoms { count: usize, cap: usize },
    #[error("rule {rule} contains a nested aggregate")]
    NestedAggregate { rule: usize },
    #[error("the aggregate in rule {rule} depends on its own head")]
    RecursiveAggregate { rule: usize },
    #[error("#sum over a non-integer first term")]
    NonIntegerSum,
}

/// Size guards for grounding and enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_rule_vars: usize,
    /// Atoms whose truth value has to be guessed during enumeration.
    pub max_guess_atoms: usize,
    pub max_possible_atoms: usize,
    pub max_ground_rules: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_rule_vars: 10,
            max_guess_atoms: 22,
            max_possible_atoms: 100_000,
            max_ground_rules: 1_000_000,
        }
    }
}

/// Ground instances dropped because their arithmetic had no value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub division_by_zero: usize,
    pub overflow: usize,
    pub non_integer: usize,
    pub(crate) sum_error: Option<OracleError>,
}

impl Diagnostics {
    fn record(&mut self, e: EvalError) {
        match e {
            EvalError::DivisionByZero => self.division_by_zero += 1,
            EvalError::Overflow => self.overflow += 1,
            EvalError::NonInteger | EvalError::Unbound => self.non_integer += 1,
        }
    }

    fn merge(&mut self, other: &Diagnostics) {
        self.division_by_zero += other.division_by_zero;
        self.overflow += other.overflow;
        self.non_integer += other.non_integer;
    }

    pub fn dropped(&self) -> usize {
        self.division_by_zero + self.overflow + self.non_integer
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeakTuple {
    pub weight: i64,
    pub level: i64,
    pub terms: Vec<Constant>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundElement {
    pub tuple: Vec<Constant>,
    pub pos: Vec<GroundAtom>,
    pub neg: Vec<GroundAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAggregate {
    pub guard: Constant,
    pub relation: Relation,
    pub function: AggregateFunction,
    pub elements: Vec<GroundElement>,
}

impl GroundAggregate {
    /// Truth of the aggregate when `holds` says which atoms are true.
    pub fn satisfied(&self, holds: &dyn Fn(&GroundAtom) -> bool) -> bool {
        let tuples: BTreeSet<&Vec<Constant>> = self
            .elements
            .iter()
            .filter(|e| e.pos.iter().all(holds) && !e.neg.iter().any(holds))
            .map(|e| &e.tuple)
            .collect();
        aggregate_holds(self.function, self.relation, &self.guard, tuples.into_iter())
    }
}

pub(crate) fn aggregate_holds<'a>(
    function: AggregateFunction,
    relation: Relation,
    guard: &Constant,
    tuples: impl Iterator<Item = &'a Vec<Constant>>,
) -> bool {
    let value = match function {
        AggregateFunction::Count => Some(Constant::Int(tuples.count() as i64)),
        AggregateFunction::Sum => Some(Constant::Int(
            tuples
                .filter_map(|t| t.first().and_then(Constant::as_int))
                .fold(0i64, i64::saturating_add),
        )),
        AggregateFunction::Max => tuples.filter_map(|t| t.first()).max().cloned(),
        AggregateFunction::Min => tuples.filter_map(|t| t.first()).min().cloned(),
    };
    match value {
        Some(v) => relation.holds(guard, &v),
        // #max and #min of nothing satisfy no guard
        None => false,
    }
}

/// A ground rule. Builtins are evaluated away during grounding;
/// negative atoms that can never be true are dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub head: Vec<GroundAtom>,
    pub pos: Vec<GroundAtom>,
    pub neg: Vec<GroundAtom>,
    pub aggregates: Vec<GroundAggregate>,
    pub weak: Option<WeakTuple>,
    /// Instance of an input fact.
    pub fact: bool,
}

impl GroundRule {
    pub fn body_holds(&self, holds: &dyn Fn(&GroundAtom) -> bool) -> bool {
        self.pos.iter().all(holds) && !self.neg.iter().any(holds) && self.aggregates.iter().all(|a| a.satisfied(holds))
    }
}

impl fmt::Display for GroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.head.iter().map(|a| a.to_string()).collect();
        let mut body: Vec<String> = self.pos.iter().map(|a| a.to_string()).collect();
        body.extend(self.neg.iter().map(|a| format!("not {a}")));
        for agg in &self.aggregates {
            let els: Vec<String> = agg
                .elements
                .iter()
                .map(|e| {
                    let t: Vec<String> = e.tuple.iter().map(|c| c.to_string()).collect();
                    let mut c: Vec<String> = e.pos.iter().map(|a| a.to_string()).collect();
                    c.extend(e.neg.iter().map(|a| format!("not {a}")));
                    format!("{} : {}", t.join(","), c.join(", "))
                })
                .collect();
            body.push(format!("{} {} {}{{{}}}", agg.guard, agg.relation, agg.function, els.join("; ")));
        }
        if self.weak.is_some() {
            f.write_str(":~ ")?;
        } else {
            f.write_str(&head.join(" | "))?;
            if !body.is_empty() {
                f.write_str(if head.is_empty() { ":- " } else { " :- " })?;
            }
        }
        f.write_str(&body.join(", "))?;
        f.write_str(".")?;
        if let Some(w) = &self.weak {
            write!(f, " [{}@{}", w.weight, w.level)?;
            for t in &w.terms {
                write!(f, ",{t}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub diagnostics: Diagnostics,
}

impl GroundProgram {
    /// Every atom occurring in the program.
    pub fn atoms(&self) -> BTreeSet<GroundAtom> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.extend(r.head.iter().cloned());
            out.extend(r.pos.iter().cloned());
            out.extend(r.neg.iter().cloned());
            for a in &r.aggregates {
                for e in &a.elements {
                    out.extend(e.pos.iter().cloned());
                    out.extend(e.neg.iter().cloned());
                }
            }
        }
        out
    }
}

/// An answer set together with its cost per priority level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedModel {
    pub interpretation: Interpretation,
    pub weight_by_level: BTreeMap<i64, i64>,
}

/// Grounds `program` over the atoms it can possibly derive.
///
/// Variables are bound by matching positive body atoms against those
/// atoms and by evaluating arithmetic bindings, so derived constants
/// such as `4` from `X = 2+2` take part in later matches. Instances
/// with a false builtin or a failing arithmetic term are dropped.
pub fn ground(program: &Program) -> Result<GroundProgram, OracleError> {
    ground_with(program, &Limits::default())
}

pub fn ground_with(program: &Program, limits: &Limits) -> Result<GroundProgram, OracleError> {
    ground::ground(program, limits)
}

/// All stable models of `g`, sorted.
pub fn stable_models(g: &GroundProgram) -> Result<Vec<Interpretation>, OracleError> {
    stable_models_with(g, &Limits::default())
}

pub fn stable_models_with(g: &GroundProgram, limits: &Limits) -> Result<Vec<Interpretation>, OracleError> {
    solve::stable_models(g, limits)
}

/// Stable models straight from the definition: every subset of the
/// atoms is tried as a model and checked for minimality against the
/// reduct. Only usable for a handful of atoms; meant for cross-checks.
pub fn stable_models_exhaustive(g: &GroundProgram, limits: &Limits) -> Result<Vec<Interpretation>, OracleError> {
    solve::exhaustive(g, limits)
}

/// Cost of `model`: weights of the distinct satisfied weak tuples,
/// summed per level. Levels that sum to zero are omitted.
pub fn weights(g: &GroundProgram, model: &Interpretation) -> BTreeMap<i64, i64> {
    let holds = |a: &GroundAtom| model.contains(a);
    let tuples: BTreeSet<&WeakTuple> = g
        .rules
        .iter()
        .filter_map(|r| r.weak.as_ref().filter(|_| r.body_holds(&holds)))
        .collect();
    let mut out = BTreeMap::new();
    for t in tuples {
        *out.entry(t.level).or_insert(0i64) += t.weight;
    }
    out.retain(|_, w| *w != 0);
    out
}

pub fn weighted_models(g: &GroundProgram) -> Result<Vec<WeightedModel>, OracleError> {
    Ok(stable_models(g)?
        .into_iter()
        .map(|i| WeightedModel {
            weight_by_level: weights(g, &i),
            interpretation: i,
        })
        .collect())
}

/// Compares costs: higher levels first, lower weight is better.
pub fn compare_weights(a: &BTreeMap<i64, i64>, b: &BTreeMap<i64, i64>) -> std::cmp::Ordering {
    let levels: BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    for l in levels.into_iter().rev() {
        let x = a.get(&l).copied().unwrap_or(0);
        let y = b.get(&l).copied().unwrap_or(0);
        if x != y {
            return x.cmp(&y);
        }
    }
    std::cmp::Ordering::Equal
}

/// Cost of the best models, or `None` without models.
pub fn optimal_weights(models: &[WeightedModel]) -> Option<BTreeMap<i64, i64>> {
    models
        .iter()
        .map(|m| &m.weight_by_level)
        .min_by(|a, b| compare_weights(a, b))
        .cloned()
}

/// Keeps the atoms whose predicate and arity are in `schema`.
pub fn strip(i: &Interpretation, schema: &BTreeSet<(String, usize)>) -> Interpretation {
    i.iter().filter(|a| schema.contains(&a.signature())).cloned().collect()
}

/// Whether dropping the fresh predicates maps the answer sets of
/// `rewritten` one-to-one onto those of `original`, with equal costs.
pub fn equivalent(original: &Program, rewritten: &Program) -> Result<bool, OracleError> {
    equivalent_with(original, rewritten, &Limits::default())
}

pub fn equivalent_with(original: &Program, rewritten: &Program, limits: &Limits) -> Result<bool, OracleError> {
    let schema = original.schema();
    let go = ground_with(original, limits)?;
    let gr = ground_with(rewritten, limits)?;
    let mo = stable_models_with(&go, limits)?;
    let mr = stable_models_with(&gr, limits)?;
    if mo.len() != mr.len() {
        return Ok(false);
    }
    let by_original: BTreeMap<&Interpretation, BTreeMap<i64, i64>> = mo.iter().map(|m| (m, weights(&go, m))).collect();
    let mut hit = BTreeSet::new();
    for m in &mr {
        let s = strip(m, &schema);
        match by_original.get(&s) {
            Some(w) if *w == weights(&gr, m) && hit.insert(s.clone()) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Sizes of a grounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundingSize {
    /// Ground instances of non-fact rules.
    pub rules: usize,
    /// Distinct atoms in the whole ground program, facts included.
    pub atoms: usize,
}

/// Number of ground instances of the non-fact rules of `program`.
pub fn grounding_size(program: &Program) -> Result<usize, OracleError> {
    Ok(grounding_stats(program)?.rules)
}

pub fn grounding_stats(program: &Program) -> Result<GroundingSize, OracleError> {
    let g = ground(program)?;
    Ok(GroundingSize {
        rules: g.rules.iter().filter(|r| !r.fact).count(),
        atoms: g.atoms().len(),
    })
}

/// Answer sets of a non-ground program.
pub fn answer_sets(program: &Program) -> Result<Vec<Interpretation>, OracleError> {
    stable_models(&ground(program)?)
}
