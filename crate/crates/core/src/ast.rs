//! Data model for the supported ASP-Core-2 fragment.
//!
//! Values are immutable once built; every rewriting pass produces new
//! values rather than mutating shared ones.

use std::collections::BTreeSet;
use std::fmt;

/// A variable name. Always starts with an uppercase letter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Variable {
    fn from(s: &str) -> Self {
        Variable(s.to_owned())
    }
}

/// Integers and symbols share one kind. The derived order puts every
/// integer before every symbol; integers compare by value and symbols
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Int(i64),
    /// A lowercase identifier or a double-quoted string (quotes kept).
    Sym(String),
}

impl Constant {
    pub fn sym(s: impl Into<String>) -> Self {
        Constant::Sym(s.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Constant::Int(i) => Some(*i),
            Constant::Sym(_) => None,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Int(i) => write!(f, "{i}"),
            Constant::Sym(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul | ArithOp::Div => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Constant),
    Var(Variable),
    Arith(ArithOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Variable::new(name))
    }

    pub fn int(i: i64) -> Self {
        Term::Const(Constant::Int(i))
    }

    pub fn sym(s: &str) -> Self {
        Term::Const(Constant::sym(s))
    }

    pub fn arith(op: ArithOp, lhs: Term, rhs: Term) -> Self {
        Term::Arith(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn is_simple(&self) -> bool {
        !matches!(self, Term::Arith(..))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Arith(op, l, r) => {
                let p = op.precedence();
                // left-associative: a right operand of equal precedence needs parens
                let parens = p < parent || (right && p == parent);
                if parens {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, p, false)?;
                f.write_str(op.symbol())?;
                r.fmt_prec(f, p, true)?;
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn signature(&self) -> (String, usize) {
        (self.predicate.clone(), self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }
}

fn write_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, args: &[T], sep: &str) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_args(f, &self.args, ",")?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Relation {
    /// The relation obtained by swapping the operands.
    pub fn flip(self) -> Self {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Gt => Relation::Lt,
            r => r,
        }
    }

    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggregateFunction {
    Count,
    Sum,
    Max,
    Min,
}

impl fmt::Display for AggregateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AggregateFunction::Count => "#count",
            AggregateFunction::Sum => "#sum",
            AggregateFunction::Max => "#max",
            AggregateFunction::Min => "#min",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateElement {
    pub terms: Vec<Term>,
    pub condition: Vec<BodyElement>,
}

impl fmt::Display for AggregateElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_args(f, &self.terms, ",")?;
        if !self.condition.is_empty() {
            if !self.terms.is_empty() {
                f.write_str(" ")?;
            }
            f.write_str(": ")?;
            write_args(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

/// `guard relation #function{ elements }`. Right-hand guards are flipped
/// onto the left by the parser so there is exactly one representation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateExpr {
    pub guard: Term,
    pub relation: Relation,
    pub function: AggregateFunction,
    pub elements: Vec<AggregateElement>,
}

impl AggregateExpr {
    /// Variables occurring in the guard; these are global to the rule.
    pub fn guard_vars(&self) -> BTreeSet<Variable> {
        self.guard.vars()
    }

    pub fn has_nested_aggregate(&self) -> bool {
        self.elements
            .iter()
            .flat_map(|e| &e.condition)
            .any(|c| matches!(c, BodyElement::Aggregate(_)))
    }
}

impl fmt::Display for AggregateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}{{", self.guard, self.relation, self.function)?;
        write_args(f, &self.elements, "; ")?;
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyElement {
    Pos(Atom),
    Neg(Atom),
    Comparison {
        relation: Relation,
        lhs: Term,
        rhs: Term,
    },
    /// `target = expr`, where `target` is a variable or a constant.
    Assign {
        target: Term,
        expr: Term,
    },
    Aggregate(AggregateExpr),
}

impl BodyElement {
    pub fn positive_atom(&self) -> Option<&Atom> {
        match self {
            BodyElement::Pos(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self, BodyElement::Aggregate(_))
    }

    /// Variables that the rule graph sees: for an aggregate only the
    /// guard plus whichever element variables are listed in `globals`.
    pub fn global_vars(&self, globals: &BTreeSet<Variable>) -> BTreeSet<Variable> {
        match self {
            BodyElement::Aggregate(agg) => {
                let mut vs: BTreeSet<Variable> =
                    agg.vars().intersection(globals).cloned().collect();
                vs.extend(agg.guard_vars());
                vs
            }
            other => other.vars(),
        }
    }
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Pos(a) => write!(f, "{a}"),
            BodyElement::Neg(a) => write!(f, "not {a}"),
            BodyElement::Comparison { relation, lhs, rhs } => write!(f, "{lhs} {relation} {rhs}"),
            BodyElement::Assign { target, expr } => write!(f, "{target} = {expr}"),
            BodyElement::Aggregate(agg) => write!(f, "{agg}"),
        }
    }
}

/// `[weight@level, terms]` attached to a weak constraint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeakAnnotation {
    pub weight: Term,
    pub level: Term,
    pub terms: Vec<Term>,
}

impl fmt::Display for WeakAnnotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}@{}", self.weight, self.level)?;
        for t in &self.terms {
            write!(f, ",{t}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    /// Disjunction; empty for constraints.
    pub head: Vec<Atom>,
    pub body: Vec<BodyElement>,
    /// Present only on weak constraints, whose head is always empty.
    pub weak: Option<WeakAnnotation>,
}

impl Rule {
    pub fn new(head: Vec<Atom>, body: Vec<BodyElement>) -> Self {
        Rule {
            head,
            body,
            weak: None,
        }
    }

    pub fn fact(atom: Atom) -> Self {
        Rule::new(vec![atom], Vec::new())
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.weak.is_none() && !self.head.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn head_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for a in &self.head {
            a.collect_vars(&mut out);
        }
        out
    }

    /// Variables occurring outside aggregate elements: head, plain body
    /// elements, aggregate guards and the weak annotation. Everything
    /// else is local to the aggregate it appears in.
    pub fn global_vars(&self) -> BTreeSet<Variable> {
        let mut out = self.head_vars();
        for e in &self.body {
            match e {
                BodyElement::Aggregate(agg) => agg.guard.collect_vars(&mut out),
                other => other.collect_vars(&mut out),
            }
        }
        if let Some(w) = &self.weak {
            w.collect_vars(&mut out);
        }
        out
    }

    /// Global variables in order of first occurrence, body first, then
    /// head, then the weak annotation.
    pub fn ordered_global_vars(&self) -> Vec<Variable> {
        let globals = self.global_vars();
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut push = |t: &Term| {
            let mut vs = Vec::new();
            t.collect_ordered(&mut vs);
            for v in vs {
                if globals.contains(&v) && seen.insert(v.clone()) {
                    order.push(v);
                }
            }
        };
        for e in &self.body {
            for t in e.terms_in_order() {
                push(t);
            }
        }
        for a in &self.head {
            a.args.iter().for_each(&mut push);
        }
        if let Some(w) = &self.weak {
            push(&w.weight);
            push(&w.level);
            w.terms.iter().for_each(&mut push);
        }
        order
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.weak.is_some() {
            f.write_str(":~ ")?;
        } else {
            write_args(f, &self.head, " | ")?;
            if !self.body.is_empty() {
                if !self.head.is_empty() {
                    f.write_str(" ")?;
                }
                f.write_str(":- ")?;
            }
        }
        write_args(f, &self.body, ", ")?;
        f.write_str(".")?;
        if let Some(w) = &self.weak {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program { rules }
    }

    /// Every constant occurring anywhere in the program.
    pub fn active_domain(&self) -> BTreeSet<Constant> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            r.visit_terms(&mut |t| t.collect_constants(&mut out));
        }
        out
    }

    /// Predicates with their arities; `p/1` and `p/2` are distinct.
    pub fn schema(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            r.visit_atoms(&mut |a| {
                out.insert(a.signature());
            });
        }
        out
    }

    pub fn predicate_names(&self) -> BTreeSet<String> {
        self.schema().into_iter().map(|(p, _)| p).collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A ground atom: a predicate applied to constants only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Constant>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Constant>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn signature(&self) -> (String, usize) {
        (self.predicate.clone(), self.args.len())
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_args(f, &self.args, ",")?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl TryFrom<&Atom> for GroundAtom {
    type Error = Variable;

    fn try_from(atom: &Atom) -> Result<Self, Variable> {
        let mut args = Vec::with_capacity(atom.args.len());
        for t in &atom.args {
            match t {
                Term::Const(c) => args.push(c.clone()),
                other => {
                    return Err(other
                        .vars()
                        .into_iter()
                        .next()
                        .unwrap_or_else(|| Variable::new("_")))
                }
            }
        }
        Ok(GroundAtom::new(atom.predicate.clone(), args))
    }
}

/// A set of ground atoms.
pub type Interpretation = BTreeSet<GroundAtom>;

/// Anything that syntactically contains variables.
pub trait Vars {
    fn collect_vars(&self, out: &mut BTreeSet<Variable>);

    fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl Vars for Term {
    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Arith(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl Term {
    fn collect_ordered(&self, out: &mut Vec<Variable>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => out.push(v.clone()),
            Term::Arith(_, l, r) => {
                l.collect_ordered(out);
                r.collect_ordered(out);
            }
        }
    }

    fn collect_constants(&self, out: &mut BTreeSet<Constant>) {
        match self {
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::Var(_) => {}
            Term::Arith(_, l, r) => {
                l.collect_constants(out);
                r.collect_constants(out);
            }
        }
    }
}

impl Vars for Atom {
    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        for t in &self.args {
            t.collect_vars(out);
        }
    }
}

impl Vars for AggregateElement {
    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        for t in &self.terms {
            t.collect_vars(out);
        }
        for c in &self.condition {
            c.collect_vars(out);
        }
    }
}

impl Vars for AggregateExpr {
    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        self.guard.collect_vars(out);
        for e in &self.elements {
            e.collect_vars(out);
        }
    }
}

impl Vars for BodyElement {
    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            BodyElement::Pos(a) | BodyElement::Neg(a) => a.collect_vars(out),
            BodyElement::Comparison { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            BodyElement::Assign { target, expr } => {
                target.collect_vars(out);
                expr.collect_vars(out);
            }
            BodyElement::Aggregate(agg) => agg.collect_vars(out),
        }
    }
}

impl Vars for WeakAnnotation {
    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        self.weight.collect_vars(out);
        self.level.collect_vars(out);
        for t in &self.terms {
            t.collect_vars(out);
        }
    }
}

impl Vars for Rule {
    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        for a in &self.head {
            a.collect_vars(out);
        }
        for e in &self.body {
            e.collect_vars(out);
        }
        if let Some(w) = &self.weak {
            w.collect_vars(out);
        }
    }
}

impl BodyElement {
    /// Top-level terms in textual order (aggregates: guard, then each
    /// element's terms and condition).
    pub fn terms_in_order(&self) -> Vec<&Term> {
        match self {
            BodyElement::Pos(a) | BodyElement::Neg(a) => a.args.iter().collect(),
            BodyElement::Comparison { lhs, rhs, .. } => vec![lhs, rhs],
            BodyElement::Assign { target, expr } => vec![target, expr],
            BodyElement::Aggregate(agg) => {
                let mut out = vec![&agg.guard];
                for e in &agg.elements {
                    out.extend(e.terms.iter());
                    for c in &e.condition {
                        out.extend(c.terms_in_order());
                    }
                }
                out
            }
        }
    }

    fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        match self {
            BodyElement::Pos(a) | BodyElement::Neg(a) => f(a),
            BodyElement::Aggregate(agg) => {
                for e in &agg.elements {
                    for c in &e.condition {
                        c.visit_atoms(f);
                    }
                }
            }
            _ => {}
        }
    }
}

impl Rule {
    fn visit_terms(&self, f: &mut dyn FnMut(&Term)) {
        for a in &self.head {
            a.args.iter().for_each(&mut *f);
        }
        for e in &self.body {
            e.terms_in_order().into_iter().for_each(&mut *f);
        }
        if let Some(w) = &self.weak {
            f(&w.weight);
            f(&w.level);
            w.terms.iter().for_each(&mut *f);
        }
    }

    /// Calls `f` on every atom, including those inside aggregates.
    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        for a in &self.head {
            f(a);
        }
        for e in &self.body {
            e.visit_atoms(f);
        }
    }
}
