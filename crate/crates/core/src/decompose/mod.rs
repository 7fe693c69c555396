//! Rule decomposition along tree decompositions.
//!
//! Each rule is cut into one rule per decomposition node. Join results
//! travel between the pieces through fresh `temp` predicates, and fresh
//! `dom` predicates restore safety where a piece lost the atom that
//! bound a variable. Weak constraints and aggregate conditions are
//! rewritten first so that the same machinery applies to them.

mod aggregate;
mod domain;
mod namer;
mod safety;
mod weak;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ast::{Atom, BodyElement, Program, Rule, Term, Variable};
use crate::rulegraph;
use crate::treedecomp::{self, decompose_graph, ensure_head_root, rule_seed, Heuristic, TdError, TreeDecomposition};

pub use aggregate::{rewrite_aggregate, AggregateRewrite};
pub use domain::synthesize_domain_rule;
pub use namer::FreshNamer;
pub use safety::check_safety;
pub use weak::rewrite_weak_constraint;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DecomposeError {
    #[error(transparent)]
    Tree(#[from] TdError),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("variable {0} cannot be made safe")]
    Unsafe(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub heuristic: Heuristic,
    pub seed: i64,
    /// Puts all head variables into one bag (the root). Off under `-i`.
    pub include_head_clique: bool,
    /// When false the program is returned unchanged; the report is
    /// still computed.
    pub enabled: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            heuristic: Heuristic::Miw,
            seed: 0,
            include_head_clique: true,
            enabled: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleReport {
    pub index: usize,
    /// Largest width among the decompositions made for this rule; -1 for
    /// rules without variables.
    pub width: i64,
    /// Bags in the decomposition of the rule itself.
    pub bags: usize,
    pub rules_emitted: usize,
    pub domain_rules: usize,
    pub fresh_predicates: usize,
    /// Decomposition of the rule itself (after aggregate and weak
    /// rewriting); `None` for facts.
    pub tree: Option<TreeDecomposition>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionReport {
    pub rules: Vec<RuleReport>,
    /// Maximum over `rules`; -1 when no rule has a variable.
    pub max_width: i64,
}

impl fmt::Display for DecompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule\twidth\tbags\temitted\tdomain\tfresh")?;
        for r in &self.rules {
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.index, r.width, r.bags, r.rules_emitted, r.domain_rules, r.fresh_predicates
            )?;
        }
        let sum = |g: fn(&RuleReport) -> usize| self.rules.iter().map(g).sum::<usize>();
        write!(
            f,
            "total\t{}\t{}\t{}\t{}\t{}",
            self.max_width,
            sum(|r| r.bags),
            sum(|r| r.rules_emitted),
            sum(|r| r.domain_rules),
            sum(|r| r.fresh_predicates)
        )
    }
}

struct Split {
    rules: Vec<Rule>,
    domain_rules: usize,
    temps: usize,
}

/// Cuts `rule` into one rule per node of `td`.
///
/// `td` must be a valid decomposition of the rule's graph whose root bag
/// holds the head variables. The rule must not carry a weak annotation.
/// Domain rules come first in the result, then one rule per node with
/// children before parents; the last rule has the original head. A
/// single-bag decomposition returns the rule itself.
pub fn decompose_rule(rule: &Rule, td: &TreeDecomposition, namer: &mut FreshNamer) -> Result<Vec<Rule>, DecomposeError> {
    split_rule(rule, td, namer, true).map(|s| s.rules)
}

fn split_rule(rule: &Rule, td: &TreeDecomposition, namer: &mut FreshNamer, head_at_root: bool) -> Result<Split, DecomposeError> {
    if rule.weak.is_some() {
        return Err(DecomposeError::Unsupported("weak constraints must be rewritten before splitting".into()));
    }
    if td.len() == 1 {
        return Ok(Split {
            rules: vec![rule.clone()],
            domain_rules: 0,
            temps: 0,
        });
    }
    if !treedecomp::validate(td, &rulegraph::build(rule, false)) {
        return Err(DecomposeError::InvalidDecomposition("decomposition does not fit the rule".into()));
    }
    let head_vars = rule.head_vars();
    if head_at_root && !head_vars.is_subset(&td.node(td.root()).bag) {
        return Err(TdError::HeadNotCovered(head_vars.into_iter().collect()).into());
    }

    let globals = rule.global_vars();
    let order = rule.ordered_global_vars();
    let depth: Vec<usize> = (0..td.len()).map(|n| td.depth(n)).collect();
    let mut assigned: Vec<Vec<&BodyElement>> = vec![Vec::new(); td.len()];
    for e in &rule.body {
        let vars = e.global_vars(&globals);
        let node = (0..td.len())
            .filter(|&n| vars.is_subset(&td.node(n).bag))
            .max_by_key(|&n| (depth[n], std::cmp::Reverse(n)))
            .ok_or_else(|| DecomposeError::InvalidDecomposition(format!("no bag covers `{e}`")))?;
        assigned[node].push(e);
    }

    let mut domain_rules = Vec::new();
    let mut pieces = Vec::new();
    let mut heads: Vec<Option<Atom>> = vec![None; td.len()];
    let mut temps = 0;
    for n in td.postorder() {
        let node = td.node(n);
        let mut body: Vec<BodyElement> = assigned[n].iter().map(|e| (*e).clone()).collect();
        for &c in &node.children {
            body.push(BodyElement::Pos(heads[c].clone().expect("children come first")));
        }
        let head = match node.parent {
            None => rule.head.clone(),
            Some(p) => {
                let below: BTreeSet<&Variable> = td.subtree(n).into_iter().flat_map(|m| &td.node(m).bag).collect();
                let above = &td.node(p).bag;
                let args: Vec<Term> = order
                    .iter()
                    .filter(|v| below.contains(v) && (above.contains(*v) || head_vars.contains(*v)))
                    .map(|v| Term::Var(v.clone()))
                    .collect();
                temps += 1;
                let atom = Atom::new(namer.temp(), args);
                heads[n] = Some(atom.clone());
                vec![atom]
            }
        };
        let mut piece = Rule::new(head, body);
        loop {
            let unsafe_vars = check_safety(&piece);
            if unsafe_vars.is_empty() {
                break;
            }
            let v = pick_unsafe(&piece, &order, &unsafe_vars);
            let atom = domain::domain_atom(&v, rule, namer, &mut domain_rules)?;
            piece.body.push(BodyElement::Pos(atom));
        }
        pieces.push(piece);
    }
    let count = domain_rules.len();
    domain_rules.extend(pieces);
    Ok(Split {
        rules: domain_rules,
        domain_rules: count,
        temps,
    })
}

/// Prefers a variable that no arithmetic binding in `piece` defines;
/// binding its inputs may make the defined ones safe for free.
fn pick_unsafe(piece: &Rule, order: &[Variable], unsafe_vars: &BTreeSet<Variable>) -> Variable {
    let targets: BTreeSet<&Variable> = piece
        .body
        .iter()
        .filter_map(|e| match e {
            BodyElement::Assign { target: Term::Var(v), .. } => Some(v),
            _ => None,
        })
        .collect();
    let ordered = order.iter().filter(|v| unsafe_vars.contains(*v));
    ordered
        .clone()
        .find(|v| !targets.contains(v))
        .or_else(|| ordered.clone().next())
        .or_else(|| unsafe_vars.iter().next())
        .expect("non-empty")
        .clone()
}

struct Outcome {
    rules: Vec<Rule>,
    report: RuleReport,
}

fn decompose_one(rule: &Rule, options: &Options, seed: u64, namer: &mut FreshNamer) -> Result<(Split, TreeDecomposition), DecomposeError> {
    let g = rulegraph::build(rule, options.include_head_clique);
    let mut td = decompose_graph(&g, options.heuristic, seed);
    if options.include_head_clique {
        td = ensure_head_root(&td, &rule.head_vars())?;
    }
    let split = split_rule(rule, &td, namer, options.include_head_clique)?;
    Ok((split, td))
}

fn decompose_indexed(index: usize, rule: &Rule, options: &Options, namer: &mut FreshNamer) -> Result<Outcome, DecomposeError> {
    let verbatim = |width: i64, tree: Option<TreeDecomposition>| Outcome {
        rules: vec![rule.clone()],
        report: RuleReport {
            index,
            width,
            bags: 1,
            rules_emitted: 1,
            domain_rules: 0,
            fresh_predicates: 0,
            tree,
        },
    };
    if rule.is_fact() {
        return Ok(verbatim(-1, None));
    }
    namer.begin_rule(index);
    let seed = rule_seed(options.seed, index);

    let mut main = rule.clone();
    let mut agg_temps = Vec::new();
    let mut agg_domains = Vec::new();
    let nested = main.body.iter().any(|e| matches!(e, BodyElement::Aggregate(a) if a.has_nested_aggregate()));
    if !nested {
        for i in 0..main.body.len() {
            if main.body[i].is_aggregate() {
                if let Some(rw) = rewrite_aggregate(&main, i, namer)? {
                    main = rw.rule;
                    agg_temps.extend(rw.temp_rules);
                    agg_domains.extend(rw.domain_rules);
                }
            }
        }
    }

    if agg_temps.is_empty() {
        let g = rulegraph::build(rule, options.include_head_clique);
        let td = decompose_graph(&g, options.heuristic, seed);
        if td.len() == 1 {
            return Ok(verbatim(td.width(), Some(td)));
        }
    }

    let mut out = Vec::new();
    let mut width = -1;
    let mut domain_rules = agg_domains.len();
    let mut fresh = agg_temps.len() + agg_domains.len();
    out.extend(agg_domains);
    for t in &agg_temps {
        let (split, td) = decompose_one(t, options, seed, namer)?;
        width = width.max(td.width());
        domain_rules += split.domain_rules;
        fresh += split.domain_rules + split.temps;
        out.extend(split.rules);
    }
    let (main, weak_rule) = if main.weak.is_some() {
        fresh += 1;
        let (t, w) = rewrite_weak_constraint(&main, namer);
        (t, Some(w))
    } else {
        (main, None)
    };
    let (split, td) = decompose_one(&main, options, seed, namer)?;
    width = width.max(td.width());
    domain_rules += split.domain_rules;
    fresh += split.domain_rules + split.temps;
    out.extend(split.rules);
    out.extend(weak_rule);
    Ok(Outcome {
        report: RuleReport {
            index,
            width,
            bags: td.len(),
            rules_emitted: out.len(),
            domain_rules,
            fresh_predicates: fresh,
            tree: Some(td),
        },
        rules: out,
    })
}

/// Decomposes every rule of `program`.
///
/// Facts and rules whose graph fits in one bag are copied unchanged.
/// Weak constraints are turned into a temporary rule plus a one-atom
/// weak constraint, and aggregate conditions are split before the rule
/// itself is decomposed.
pub fn decompose_program(program: &Program, options: &Options) -> Result<(Program, DecompositionReport), DecomposeError> {
    let mut namer = FreshNamer::new(program.predicate_names());
    let mut rules = Vec::new();
    let mut report = DecompositionReport {
        rules: Vec::with_capacity(program.rules.len()),
        max_width: -1,
    };
    for (i, rule) in program.rules.iter().enumerate() {
        let outcome = decompose_indexed(i, rule, options, &mut namer)?;
        report.max_width = report.max_width.max(outcome.report.width);
        report.rules.push(outcome.report);
        rules.extend(outcome.rules);
    }
    let out = if options.enabled {
        Program::new(rules)
    } else {
        program.clone()
    };
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn run(src: &str) -> (Vec<String>, DecompositionReport) {
        let p = parse(src).unwrap();
        let (out, rep) = decompose_program(&p, &Options::default()).unwrap();
        (out.rules.iter().map(|r| r.to_string()).collect(), rep)
    }

    #[test]
    fn cycle_rule() {
        let (rules, rep) = run("h(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).");
        assert_eq!(
            rules,
            [
                "dom_0_W(W) :- e(W,X).",
                "temp_0_0(Y,W) :- e(Y,Z), not e(Z,W), dom_0_W(W).",
                "h(X,W) :- e(X,Y), e(W,X), temp_0_0(Y,W).",
            ]
        );
        assert_eq!(rep.max_width, 2);
        assert_eq!(rep.rules[0].bags, 2);
        assert_eq!(rep.rules[0].rules_emitted, 3);
        assert_eq!(rep.rules[0].domain_rules, 1);
    }

    #[test]
    fn arithmetic_domain() {
        let rule = parse("a(X) :- not b(X,Y), c(Y), d(Z), X = Z+Z.").unwrap().rules.remove(0);
        let bag = |vs: &[&str]| vs.iter().map(|v| Variable::from(*v)).collect::<BTreeSet<_>>();
        // root {X,Z} keeps the binding, the leaf {X,Y} loses it
        let td = TreeDecomposition::from_parts(vec![bag(&["X", "Z"]), bag(&["X", "Y"])], vec![None, Some(0)]);
        let mut namer = FreshNamer::new(BTreeSet::new());
        let rules: Vec<String> = decompose_rule(&rule, &td, &mut namer)
            .unwrap()
            .iter()
            .map(|r| r.to_string())
            .collect();
        assert_eq!(
            rules,
            [
                "dom_0_X(X) :- X = Z+Z, d(Z).",
                "temp_0_0(X) :- not b(X,Y), c(Y), dom_0_X(X).",
                "a(X) :- d(Z), X = Z+Z, temp_0_0(X).",
            ]
        );
        for r in &rules {
            let rule = parse(r).unwrap().rules.remove(0);
            assert!(check_safety(&rule).is_empty());
        }
    }

    #[test]
    fn cliques_and_facts_pass_through() {
        let src = "p(X,Y) :- q(X,Y), s(Y,X).\nq(1,2).\n:- q(X,Y), not s(X,Y).\n";
        let (rules, rep) = run(src);
        assert_eq!(rules.join("\n") + "\n", src);
        assert!(rep.rules.iter().all(|r| r.rules_emitted == 1));
    }

    #[test]
    fn ground_program_is_unchanged() {
        let src = "a :- b, not c.\nb.\nc | d :- b.\n";
        let (rules, rep) = run(src);
        assert_eq!(rules.join("\n") + "\n", src);
        assert_eq!(rep.max_width, -1);
    }

    #[test]
    fn chain_rule_is_split() {
        let (rules, _) = run("h(X1,X4) :- e(X1,X2), e(X2,X3), e(X3,X4).");
        assert!(rules.len() >= 2);
        assert_eq!(rules.last().unwrap().split(" :- ").next(), Some("h(X1,X4)"));
    }

    #[test]
    fn weak_constraint_is_rewritten() {
        let (rules, _) = run(":~ e(X,Y), e(Y,Z), not e(Z,W), e(W,X). [1@0,X,W]");
        assert_eq!(rules.last().unwrap(), ":~ temp_0_0(1,0,X,W). [1@0,X,W]");
        assert_eq!(rules.len(), 4);
    }

    #[test]
    fn clique_weak_constraint_is_kept() {
        let (rules, _) = run(":~ match(M,W). [1@0,M,W]");
        assert_eq!(rules, [":~ match(M,W). [1@0,M,W]"]);
    }

    #[test]
    fn aggregate_example() {
        let (rules, rep) = run("good(X) :- vertex(X), 2 <= #count{Y : edge(X,Y), edge(Y,Z), red(Z)}.");
        assert_eq!(
            rules,
            [
                "temp_0_0(Y) :- edge(Y,Z), red(Z).",
                "good(X) :- vertex(X), 2 <= #count{Y : edge(X,Y), temp_0_0(Y)}.",
            ]
        );
        assert_eq!(rep.rules[0].fresh_predicates, 1);
    }

    #[test]
    fn disabled_returns_input_with_report() {
        let p = parse("h(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).").unwrap();
        let opts = Options {
            enabled: false,
            ..Options::default()
        };
        let (out, rep) = decompose_program(&p, &opts).unwrap();
        assert_eq!(out, p);
        assert_eq!(rep.max_width, 2);
    }

    #[test]
    fn ignoring_the_head_still_reaches_the_root() {
        let p = parse("h(X1,X4) :- e(X1,X2), e(X2,X3), e(X3,X4), e(X4,X5).").unwrap();
        let opts = Options {
            include_head_clique: false,
            ..Options::default()
        };
        let (out, _) = decompose_program(&p, &opts).unwrap();
        for r in &out.rules {
            assert!(check_safety(r).is_empty(), "{r}");
        }
        assert_eq!(out.rules.last().unwrap().head, p.rules[0].head);
    }

    #[test]
    fn fresh_names_avoid_input_predicates() {
        let (rules, _) = run("temp_0_0(X) :- e(X,Y), e(Y,Z), e(Z,X), f(Z,W), f(W,X).\ndom_0_X(1).");
        let p = parse(&rules.join("\n")).unwrap();
        let heads: Vec<&str> = p.rules.iter().flat_map(|r| &r.head).map(|a| a.predicate.as_str()).collect();
        assert_eq!(heads.iter().filter(|h| **h == "temp_0_0").count(), 1);
    }

    #[test]
    fn decompose_rule_rejects_bad_root() {
        let rule = parse("h(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).").unwrap().rules.remove(0);
        let g = rulegraph::build(&rule, true);
        let order: Vec<Variable> = ["X", "Y", "Z", "W"].into_iter().map(Variable::from).collect();
        let td = treedecomp::decomposition_from_order(&g, &order).unwrap();
        let head: BTreeSet<Variable> = rule.head_vars();
        let good = ensure_head_root(&td, &head).unwrap();
        let other = td.nodes().iter().find(|n| !head.is_subset(&n.bag)).unwrap().bag.clone();
        let bad = ensure_head_root(&td, &other).unwrap();
        let mut namer = FreshNamer::new(BTreeSet::new());
        assert!(decompose_rule(&rule, &bad, &mut namer).is_err());
        assert_eq!(decompose_rule(&rule, &good, &mut namer).unwrap().len(), 3);
    }
}
