//! Reader and writer for the supported ASP-Core-2 fragment.
//!
//! Accepted: facts, disjunctive rules (`|` or `;` between head atoms),
//! constraints, default negation, builtin comparisons, integer arithmetic
//! with `+ - * /`, `#count`/`#sum`/`#max`/`#min` aggregates with one or
//! two guards, and weak constraints `:~ body. [w@l, t1, ..., tn]`.
//!
//! Two-sided aggregates are split into two single-guard aggregates and
//! right-hand guards are moved to the left. Anonymous variables are
//! renamed apart. Every rule must be safe.

mod lexer;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ast::*;
use crate::decompose::check_safety;
use lexer::{Tok, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceLocation {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Lexical,
    Syntactic,
    UnsupportedConstruct,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Syntactic => "syntax error",
            ParseErrorKind::UnsupportedConstruct => "unsupported construct",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{location}: {kind}: {message}")]
pub struct ParseError {
    pub location: SourceLocation,
    pub kind: ParseErrorKind,
    pub message: String,
    /// Filled in for unsafe rules.
    pub unsafe_vars: Vec<Variable>,
}

impl ParseError {
    pub(crate) fn new(location: SourceLocation, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        ParseError {
            location,
            kind,
            message: message.into(),
            unsafe_vars: Vec::new(),
        }
    }
}

/// Parses program text.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    let mut rules = Vec::new();
    for (loc, rule) in statements(text)? {
        let unsafe_vars = check_safety(&rule);
        if !unsafe_vars.is_empty() {
            let names: Vec<String> = unsafe_vars.iter().map(|v| v.to_string()).collect();
            let mut err = ParseError::new(
                loc,
                ParseErrorKind::UnsupportedConstruct,
                format!("unsafe rule, unsafe variables: {}", names.join(", ")),
            );
            err.unsafe_vars = unsafe_vars.into_iter().collect();
            return Err(err);
        }
        rules.push(rule);
    }
    Ok(Program::new(rules))
}

/// Like [`parse`] but keeps unsafe rules.
#[cfg(test)]
pub(crate) fn parse_unchecked(text: &str) -> Result<Program, ParseError> {
    Ok(Program::new(statements(text)?.into_iter().map(|(_, r)| r).collect()))
}

fn statements(text: &str) -> Result<Vec<(SourceLocation, Rule)>, ParseError> {
    let tokens = lexer::tokenize(text)?;
    let mut p = Parser { toks: tokens, pos: 0 };
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        let loc = p.loc();
        let mut rule = p.statement()?;
        rename_anonymous(&mut rule);
        out.push((loc, rule));
    }
    Ok(out)
}

/// Renders a program as text, one rule per line.
pub fn render(program: &Program) -> String {
    program.to_string()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn loc(&self) -> SourceLocation {
        self.toks[self.pos].loc
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.loc(), ParseErrorKind::Syntactic, msg)
    }

    fn unsupported(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.loc(), ParseErrorKind::UnsupportedConstruct, msg)
    }

    fn statement(&mut self) -> PResult<Rule> {
        match self.peek() {
            Tok::WeakIf => {
                self.bump();
                let body = self.body()?;
                self.expect(Tok::Dot, "`.`")?;
                let weak = self.weak_annotation()?;
                Ok(Rule {
                    head: Vec::new(),
                    body,
                    weak: Some(weak),
                })
            }
            Tok::If => {
                self.bump();
                let body = self.body()?;
                self.expect(Tok::Dot, "`.`")?;
                Ok(Rule::new(Vec::new(), body))
            }
            _ => {
                let head = self.head()?;
                let body = if self.eat(&Tok::If) { self.body()? } else { Vec::new() };
                self.expect(Tok::Dot, "`.`")?;
                Ok(Rule::new(head, body))
            }
        }
    }

    fn head(&mut self) -> PResult<Vec<Atom>> {
        let mut head = vec![self.head_atom()?];
        while matches!(self.peek(), Tok::Bar | Tok::Semi) {
            self.bump();
            head.push(self.head_atom()?);
        }
        Ok(head)
    }

    fn head_atom(&mut self) -> PResult<Atom> {
        match self.peek() {
            Tok::LBrace => Err(self.unsupported("choice rules are not supported")),
            Tok::Aggregate(name) => {
                let name = name.clone();
                Err(self.unsupported(format!("`#{name}` is not supported in rule heads")))
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Ident(_)) => {
                Err(self.unsupported("classical negation is not supported"))
            }
            Tok::Ident(_) => self.atom(),
            other => Err(self.syntax(format!("expected a head atom, found {}", describe(other)))),
        }
    }

    fn weak_annotation(&mut self) -> PResult<WeakAnnotation> {
        self.expect(Tok::LBrack, "`[` after weak constraint")?;
        let weight = self.term()?;
        let level = if self.eat(&Tok::At) { self.term()? } else { Term::int(0) };
        let mut terms = Vec::new();
        while self.eat(&Tok::Comma) {
            terms.push(self.term()?);
        }
        self.expect(Tok::RBrack, "`]`")?;
        Ok(WeakAnnotation { weight, level, terms })
    }

    fn body(&mut self) -> PResult<Vec<BodyElement>> {
        let mut body = Vec::new();
        self.literal(&mut body)?;
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                    self.literal(&mut body)?;
                }
                Tok::Semi => return Err(self.unsupported("`;` in rule bodies is not supported")),
                _ => return Ok(body),
            }
        }
    }

    /// Parses one literal, pushing one element (two for a doubly
    /// guarded aggregate).
    fn literal(&mut self, out: &mut Vec<BodyElement>) -> PResult<()> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                match self.peek() {
                    Tok::Not => Err(self.unsupported("double negation is not supported")),
                    Tok::Aggregate(_) => Err(self.unsupported("negated aggregates are not supported")),
                    Tok::Minus => Err(self.unsupported("classical negation is not supported")),
                    Tok::Ident(_) => {
                        let a = self.atom()?;
                        if self.is_relation() {
                            return Err(self.unsupported("negated comparisons are not supported"));
                        }
                        out.push(BodyElement::Neg(a));
                        Ok(())
                    }
                    Tok::Int(_) | Tok::Var(_) | Tok::Anon | Tok::Str(_) | Tok::LParen => {
                        Err(self.unsupported("only atoms may be negated"))
                    }
                    other => Err(self.syntax(format!("expected an atom after `not`, found {}", describe(other)))),
                }
            }
            Tok::Aggregate(_) => {
                let (function, elements) = self.aggregate_body()?;
                let rel = self
                    .relation()
                    .ok_or_else(|| self.syntax("aggregate needs a guard"))?;
                let guard = self.term()?;
                out.push(BodyElement::Aggregate(AggregateExpr {
                    guard,
                    relation: rel.flip(),
                    function,
                    elements,
                }));
                Ok(())
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Ident(_)) => {
                Err(self.unsupported("classical negation is not supported"))
            }
            Tok::Ident(_) if !self.ident_starts_term() => {
                let a = self.atom()?;
                out.push(BodyElement::Pos(a));
                Ok(())
            }
            _ => {
                let lhs = self.term()?;
                let rel = self
                    .relation()
                    .ok_or_else(|| self.syntax(format!("expected a comparison operator, found {}", describe(self.peek()))))?;
                if let Tok::Aggregate(_) = self.peek() {
                    let (function, elements) = self.aggregate_body()?;
                    if let Some(rel2) = self.relation() {
                        let upper = self.term()?;
                        out.push(BodyElement::Aggregate(AggregateExpr {
                            guard: lhs,
                            relation: rel,
                            function,
                            elements: elements.clone(),
                        }));
                        out.push(BodyElement::Aggregate(AggregateExpr {
                            guard: upper,
                            relation: rel2.flip(),
                            function,
                            elements,
                        }));
                    } else {
                        out.push(BodyElement::Aggregate(AggregateExpr {
                            guard: lhs,
                            relation: rel,
                            function,
                            elements,
                        }));
                    }
                    return Ok(());
                }
                let rhs = self.term()?;
                if self.is_relation() {
                    return Err(self.syntax("chained comparisons are not allowed"));
                }
                out.push(classify_comparison(rel, lhs, rhs));
                Ok(())
            }
        }
    }

    /// An identifier begins a term rather than an atom when it is used as
    /// a constant in a comparison, e.g. `a != X`.
    fn ident_starts_term(&self) -> bool {
        matches!(
            self.peek_at(1),
            Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::Plus | Tok::Minus | Tok::Star | Tok::Slash
        )
    }

    fn is_relation(&self) -> bool {
        matches!(self.peek(), Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge)
    }

    fn relation(&mut self) -> Option<Relation> {
        let r = match self.peek() {
            Tok::Eq => Relation::Eq,
            Tok::Ne => Relation::Ne,
            Tok::Lt => Relation::Lt,
            Tok::Le => Relation::Le,
            Tok::Gt => Relation::Gt,
            Tok::Ge => Relation::Ge,
            _ => return None,
        };
        self.bump();
        Some(r)
    }

    fn aggregate_body(&mut self) -> PResult<(AggregateFunction, Vec<AggregateElement>)> {
        let name = match self.bump() {
            Tok::Aggregate(n) => n,
            _ => unreachable!("caller checked for an aggregate token"),
        };
        let function = match name.as_str() {
            "count" => AggregateFunction::Count,
            "sum" => AggregateFunction::Sum,
            "max" => AggregateFunction::Max,
            "min" => AggregateFunction::Min,
            other => return Err(self.unsupported(format!("`#{other}` is not supported"))),
        };
        if self.peek() == &Tok::Plus {
            return Err(self.unsupported(format!("`#{name}+` is not supported")));
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut elements = Vec::new();
        if self.peek() == &Tok::RBrace {
            return Err(self.syntax("aggregate needs at least one element"));
        }
        loop {
            elements.push(self.aggregate_element()?);
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok((function, elements))
    }

    fn aggregate_element(&mut self) -> PResult<AggregateElement> {
        let mut terms = Vec::new();
        if self.peek() != &Tok::Colon {
            terms.push(self.term()?);
            while self.eat(&Tok::Comma) {
                terms.push(self.term()?);
            }
        }
        let mut condition = Vec::new();
        if self.eat(&Tok::Colon) {
            self.literal(&mut condition)?;
            while self.eat(&Tok::Comma) {
                self.literal(&mut condition)?;
            }
        }
        if terms.is_empty() && condition.is_empty() {
            return Err(self.syntax("empty aggregate element"));
        }
        Ok(AggregateElement { terms, condition })
    }

    fn atom(&mut self) -> PResult<Atom> {
        let name = match self.bump() {
            Tok::Ident(n) => n,
            other => return Err(self.syntax(format!("expected a predicate name, found {}", describe(&other)))),
        };
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            if self.peek() == &Tok::RParen {
                return Err(self.syntax("empty argument list"));
            }
            args.push(self.term()?);
            loop {
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                        args.push(self.term()?);
                    }
                    Tok::Semi => return Err(self.unsupported("pooling is not supported")),
                    _ => break,
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(Atom::new(name, args))
    }

    fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                Tok::DotDot => return Err(self.unsupported("intervals are not supported")),
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Term::arith(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                Tok::Backslash => return Err(self.unsupported("`\\` (modulo) is not supported")),
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Term::arith(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.peek() == &Tok::Minus {
            self.bump();
            if let Tok::Int(i) = *self.peek() {
                self.bump();
                return Ok(Term::int(-i));
            }
            let inner = self.unary()?;
            return Ok(Term::arith(ArithOp::Sub, Term::int(0), inner));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Term> {
        let t = match self.peek().clone() {
            Tok::Int(i) => Term::int(i),
            Tok::Var(v) => Term::var(&v),
            Tok::Anon => Term::var("_"),
            Tok::Str(s) => Term::Const(Constant::Sym(s)),
            Tok::Ident(name) => {
                if self.peek_at(1) == &Tok::LParen {
                    return Err(self.unsupported(format!("function term `{name}(...)` is not supported")));
                }
                Term::sym(&name)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                if self.peek() == &Tok::Comma {
                    return Err(self.unsupported("tuple terms are not supported"));
                }
                self.expect(Tok::RParen, "`)`")?;
                return Ok(inner);
            }
            other => return Err(self.syntax(format!("expected a term, found {}", describe(&other)))),
        };
        self.bump();
        Ok(t)
    }
}

/// `X = expr` with a plain left side becomes an arithmetic binding;
/// everything else is a comparison.
fn classify_comparison(relation: Relation, lhs: Term, rhs: Term) -> BodyElement {
    let binds = relation == Relation::Eq
        && lhs.is_simple()
        && (matches!(lhs, Term::Var(_)) || !rhs.is_simple());
    if binds {
        BodyElement::Assign { target: lhs, expr: rhs }
    } else {
        BodyElement::Comparison { relation, lhs, rhs }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) | Tok::Var(s) | Tok::Str(s) => format!("`{s}`"),
        Tok::Aggregate(s) => format!("`#{s}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

/// Gives each `_` its own fresh name that does not clash with the rule.
fn rename_anonymous(rule: &mut Rule) {
    let taken: BTreeSet<Variable> = rule.vars();
    if !taken.contains(&Variable::new("_")) {
        return;
    }
    let mut next = 0usize;
    let mut fresh = || loop {
        let v = Variable::new(format!("Anon{next}"));
        next += 1;
        if !taken.contains(&v) {
            return v;
        }
    };
    let mut fix = |t: &mut Term| rename_in_term(t, &mut fresh);
    for a in &mut rule.head {
        a.args.iter_mut().for_each(&mut fix);
    }
    for e in &mut rule.body {
        rename_in_element(e, &mut fix);
    }
    if let Some(w) = &mut rule.weak {
        fix(&mut w.weight);
        fix(&mut w.level);
        w.terms.iter_mut().for_each(&mut fix);
    }
}

fn rename_in_term(t: &mut Term, fresh: &mut dyn FnMut() -> Variable) {
    match t {
        Term::Var(v) if v.name() == "_" => *v = fresh(),
        Term::Arith(_, l, r) => {
            rename_in_term(l, fresh);
            rename_in_term(r, fresh);
        }
        _ => {}
    }
}

fn rename_in_element(e: &mut BodyElement, fix: &mut dyn FnMut(&mut Term)) {
    match e {
        BodyElement::Pos(a) | BodyElement::Neg(a) => a.args.iter_mut().for_each(fix),
        BodyElement::Comparison { lhs, rhs, .. } => {
            fix(lhs);
            fix(rhs);
        }
        BodyElement::Assign { target, expr } => {
            fix(target);
            fix(expr);
        }
        BodyElement::Aggregate(agg) => {
            fix(&mut agg.guard);
            for el in &mut agg.elements {
                el.terms.iter_mut().for_each(&mut *fix);
                for c in &mut el.condition {
                    rename_in_element(c, fix);
                }
            }
        }
    }
}
