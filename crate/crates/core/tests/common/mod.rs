//! Shared generators and reference computations for the integration
//! tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write;
use std::fs;
use std::path::PathBuf;

use lpopt_core::rulegraph::RuleGraph;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub const CYCLE_RULE: &str = "h(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).";
pub const ARITH_RULE: &str = "a(X) :- not b(X,Y), c(Y), d(Z), X = Z+Z.";
pub const GOOD_VERTEX_RULE: &str = "good(X) :- vertex(X), 2 <= #count{Y : edge(X,Y), edge(Y,Z), red(Z)}.";
pub const GOOD_VERTEX_FACTS: &str = "vertex(1). edge(1,2). edge(1,3). edge(2,4). red(4). edge(3,4).";

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// `(file name, contents)` of every `.lp` file in the corpus, sorted.
pub fn corpus_files() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "lp"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Plain,
    Aggregate,
    Weak,
}

const VARS: [&str; 6] = ["X", "Y", "Z", "W", "U", "V"];

struct Gen {
    rng: ChaCha8Rng,
    /// Derived predicates usable in later bodies: name and arity.
    derived: Vec<(String, usize)>,
}

impl Gen {
    fn pick<'a>(&mut self, vs: &[&'a str]) -> &'a str {
        vs[self.rng.random_range(0..vs.len())]
    }

    fn facts(&mut self, out: &mut String) {
        for a in 1..=3 {
            for b in 1..=3 {
                if self.rng.random_bool(0.5) {
                    write!(out, "e({a},{b}). ").unwrap();
                }
            }
        }
        for p in ["f", "g"] {
            for a in 1..=3 {
                if self.rng.random_bool(0.5) {
                    write!(out, "{p}({a}). ").unwrap();
                }
            }
        }
        out.push('\n');
    }

    /// Positive `e` atoms forming a random tree over `vs`, plus a few
    /// extra atoms that close cycles.
    fn skeleton(&mut self, vs: &[&str]) -> Vec<String> {
        let mut body = self.tree(vs);
        if vs.len() == 1 {
            body.push(format!("f({})", vs[0]));
        }
        self.extras(vs, &mut body);
        body
    }

    fn tree(&mut self, vs: &[&str]) -> Vec<String> {
        let mut body = Vec::new();
        for k in 1..vs.len() {
            let j = self.rng.random_range(0..k);
            if self.rng.random_bool(0.5) {
                body.push(format!("e({},{})", vs[j], vs[k]));
            } else {
                body.push(format!("e({},{})", vs[k], vs[j]));
            }
        }
        body
    }

    fn extras(&mut self, vs: &[&str], body: &mut Vec<String>) {
        for _ in 0..self.rng.random_range(0..=2) {
            let a = self.pick(vs);
            let b = self.pick(vs);
            match self.rng.random_range(0..3) {
                0 => body.push(format!("e({a},{b})")),
                1 => body.push(format!("f({a})")),
                _ => body.push(format!("g({a})")),
            }
        }
        if !self.derived.is_empty() && self.rng.random_bool(0.3) {
            let (p, n) = self.derived[self.rng.random_range(0..self.derived.len())].clone();
            body.push(self.derived_atom(&p, n, vs));
        }
    }

    fn derived_atom(&mut self, p: &str, arity: usize, vs: &[&str]) -> String {
        if arity == 0 {
            return p.to_string();
        }
        let args: Vec<&str> = (0..arity).map(|_| self.pick(vs)).collect();
        format!("{p}({})", args.join(","))
    }

    fn literals(&mut self, vs: &mut Vec<&'static str>, body: &mut Vec<String>) {
        if self.rng.random_bool(0.5) {
            let a = self.pick(vs);
            let b = self.pick(vs);
            let lit = match self.rng.random_range(0..4) {
                0 => format!("not e({a},{b})"),
                1 => format!("not f({a})"),
                2 => format!("not g({b})"),
                _ if !self.derived.is_empty() => {
                    let (p, n) = self.derived[self.rng.random_range(0..self.derived.len())].clone();
                    format!("not {}", self.derived_atom(&p, n, vs))
                }
                _ => format!("not e({b},{a})"),
            };
            body.push(lit);
        }
        if self.rng.random_bool(0.3) {
            let a = self.pick(vs);
            let b = self.pick(vs);
            let rel = ["<", "!=", "<=", ">"][self.rng.random_range(0..4)];
            body.push(format!("{a} {rel} {b}"));
        }
        if vs.len() < VARS.len() && self.rng.random_bool(0.3) {
            let t = VARS[vs.len()];
            let a = self.pick(vs);
            let b = self.pick(vs);
            let expr = match self.rng.random_range(0..3) {
                0 => format!("{a}+1"),
                1 => format!("{a}+{b}"),
                _ => format!("{a}-{b}"),
            };
            body.push(format!("{t} = {expr}"));
            vs.push(t);
            match self.rng.random_range(0..3) {
                0 => body.push(format!("not f({t})")),
                1 => body.push(format!("{t} <= 4")),
                _ => {}
            }
        }
    }

    fn head(&mut self, name: &str, vs: &[&str]) -> String {
        let arity = self.rng.random_range(0..=2.min(vs.len()));
        self.derived.push((name.to_string(), arity));
        if arity == 0 {
            return name.to_string();
        }
        let mut args: Vec<&str> = Vec::new();
        while args.len() < arity {
            let v = self.pick(vs);
            if !args.contains(&v) {
                args.push(v);
            }
        }
        format!("{name}({})", args.join(","))
    }

    fn plain_rule(&mut self, name: &str) -> String {
        let n = self.rng.random_range(2..=5);
        let mut vs: Vec<&'static str> = VARS[..n].to_vec();
        let mut body = self.skeleton(&vs);
        self.literals(&mut vs, &mut body);
        body.shuffle(&mut self.rng);
        if self.rng.random_bool(0.15) {
            return format!(":- {}.", body.join(", "));
        }
        let head = self.head(name, &vs);
        format!("{head} :- {}.", body.join(", "))
    }

    fn choice_pair(&mut self, a: &str, b: &str) -> String {
        self.derived.push((a.to_string(), 1));
        self.derived.push((b.to_string(), 1));
        format!("{a}(X) :- f(X), not {b}(X).\n{b}(X) :- f(X), not {a}(X).")
    }

    fn aggregate_rule(&mut self, name: &str) -> String {
        let two_globals = self.rng.random_bool(0.4);
        let mut outer = vec!["f(X)".to_string()];
        let globals: Vec<&str> = if two_globals {
            outer.push("e(X,W)".to_string());
            vec!["X", "W"]
        } else {
            vec!["X"]
        };
        let anchor = self.pick(&globals);
        let mut cond = vec![format!("e({anchor},Y)"), "e(Y,Z)".to_string()];
        match self.rng.random_range(0..4) {
            0 => cond.push("g(Z)".to_string()),
            1 => cond.push("not g(Z)".to_string()),
            2 => cond.push("e(Z,U)".to_string()),
            _ => {}
        }
        cond.shuffle(&mut self.rng);
        let sum = self.rng.random_bool(0.4);
        let (func, terms) = if sum {
            ("#sum", if self.rng.random_bool(0.5) { "Y" } else { "Y,Z" })
        } else {
            ("#count", if self.rng.random_bool(0.5) { "Y" } else { "Y,Z" })
        };
        let guard = self.rng.random_range(1..=if sum { 5 } else { 3 });
        let agg = format!("{func}{{{terms} : {}}}", cond.join(", "));
        let agg = match self.rng.random_range(0..3) {
            0 => format!("{guard} <= {agg}"),
            1 => format!("{agg} < {}", guard + 1),
            _ => format!("{guard} = {agg}"),
        };
        outer.push(agg);
        let head = self.head(name, &globals);
        format!("{head} :- {}.", outer.join(", "))
    }

    fn weak_rule(&mut self) -> String {
        let n = self.rng.random_range(3..=5);
        let mut vs: Vec<&'static str> = VARS[..n].to_vec();
        let mut body = self.tree(&vs);
        if self.derived.iter().any(|(p, _)| p == "in") && self.rng.random_bool(0.7) {
            body.push(format!("in({})", self.pick(&vs)));
        }
        if self.rng.random_bool(0.3) {
            self.literals(&mut vs, &mut body);
        }
        let weight = if self.rng.random_bool(0.5) {
            self.rng.random_range(1..=3).to_string()
        } else {
            self.pick(&vs).to_string()
        };
        let level = self.rng.random_range(0..=1);
        let mut terms = String::new();
        for _ in 0..self.rng.random_range(0..=2) {
            terms.push(',');
            terms.push_str(self.pick(&vs));
        }
        format!(":~ {}. [{weight}@{level}{terms}]", body.join(", "))
    }
}

/// A small safe program over the constants 1, 2 and 3 with at most four
/// rules besides the facts.
pub fn random_program(seed: u64, flavor: Flavor) -> String {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        derived: Vec::new(),
    };
    let mut out = String::new();
    g.facts(&mut out);
    let mut budget = g.rng.random_range(1..=4usize);
    match flavor {
        Flavor::Plain => {}
        Flavor::Aggregate => budget = budget.max(2),
        Flavor::Weak => budget = budget.max(3),
    }
    let mut rules = Vec::new();
    let choice = if flavor == Flavor::Weak { 0.6 } else { 0.3 };
    if budget >= 3 && g.rng.random_bool(choice) {
        rules.push(g.choice_pair("in", "out"));
        budget -= 2;
    }
    let special = usize::from(flavor != Flavor::Plain);
    for i in 0..budget - special {
        rules.push(g.plain_rule(&format!("p{i}")));
    }
    match flavor {
        Flavor::Plain => {}
        Flavor::Aggregate => rules.push(g.aggregate_rule("agg")),
        Flavor::Weak => rules.push(g.weak_rule()),
    }
    out.push_str(&rules.join("\n"));
    out.push('\n');
    out
}

/// The 100 programs of the equivalence suite: 30 with an aggregate,
/// 20 with a weak constraint, 50 plain.
pub fn equivalence_suite() -> Vec<(u64, Flavor, String)> {
    (0..100u64)
        .map(|seed| {
            let flavor = match seed {
                0..=29 => Flavor::Aggregate,
                30..=49 => Flavor::Weak,
                _ => Flavor::Plain,
            };
            (seed, flavor, random_program(seed, flavor))
        })
        .collect()
}

/// `h(X1) :- e(X1,X2), ..., e(Xn-1,Xn)`, or with head `h(X1,Xn)` when
/// `ends` is set, over the full relation `e` on `1..=d`.
pub fn chain_program(n: usize, d: usize, ends: bool) -> String {
    let mut s = String::new();
    for a in 1..=d {
        for b in 1..=d {
            write!(s, "e({a},{b}). ").unwrap();
        }
    }
    let body: Vec<String> = (1..n).map(|i| format!("e(X{},X{})", i, i + 1)).collect();
    let head = if ends { format!("h(X1,X{n})") } else { "h(X1)".to_string() };
    writeln!(s, "\n{head} :- {}.", body.join(", ")).unwrap();
    s
}

/// Fifty rules whose variable graphs are complete.
pub fn clique_corpus() -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    for k in 0..50 {
        let n = rng.random_range(0..=4usize);
        let vs = &VARS[..n];
        let mut body = Vec::new();
        if n == 0 {
            body.push("q".to_string());
        } else {
            body.push(format!("q{k}({})", vs.join(",")));
        }
        for _ in 0..rng.random_range(0..=2) {
            let sub: Vec<&str> = vs.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
            if sub.is_empty() {
                continue;
            }
            let lit = if rng.random_bool(0.5) { "not " } else { "" };
            body.push(format!("{lit}r{}({})", sub.len(), sub.join(",")));
        }
        if n >= 2 && rng.random_bool(0.4) {
            body.push(format!("{} < {}", vs[0], vs[n - 1]));
        }
        if n >= 1 && rng.random_bool(0.2) {
            body.push(format!("1 <= #count{{A : s({}, A)}}", vs[0]));
        }
        let rule = match rng.random_range(0..4) {
            0 => format!(":- {}.", body.join(", ")),
            1 if n > 0 => format!(":~ {}. [1@0,{}]", body.join(", "), vs.join(",")),
            2 if n >= 2 => format!("a{k}({}) | b{k}({}) :- {}.", vs[0], vs[1], body.join(", ")),
            _ => format!("h{k}({}) :- {}.", vs.join(","), body.join(", ")),
        };
        let rule = rule.replace("h0() :-", "h0 :-").replace(&format!("h{k}() :-"), &format!("h{k} :-"));
        out.push(rule);
    }
    out
}

/// A program with `rules` random non-trivial rules over up to eight
/// variables each.
pub fn large_program(rules: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["A", "B", "C", "D", "E", "F", "G", "H"];
    let mut s = String::new();
    for i in 0..rules {
        let n = rng.random_range(4..=8);
        let vs = &names[..n];
        let mut body = Vec::new();
        for k in 1..n {
            let j = rng.random_range(0..k);
            body.push(format!("e({},{})", vs[j], vs[k]));
        }
        for _ in 0..rng.random_range(0..=3) {
            let a = vs[rng.random_range(0..n)];
            let b = vs[rng.random_range(0..n)];
            body.push(format!("r{}({a},{b})", rng.random_range(0..5)));
        }
        if rng.random_bool(0.3) {
            body.push(format!("not f({})", vs[n - 1]));
        }
        writeln!(s, "p{i}({},{}) :- {}.", vs[0], vs[n - 1], body.join(", ")).unwrap();
    }
    s
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> RuleGraph {
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((names[a].as_str(), names[b].as_str()));
            }
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    RuleGraph::from_edges(&refs, &edges)
}

/// Exact treewidth by dynamic programming over vertex subsets; -1 for the
/// empty graph. Only for small graphs.
pub fn exact_treewidth(g: &RuleGraph) -> i64 {
    let n = g.len();
    if n == 0 {
        return -1;
    }
    let full = (1usize << n) - 1;
    let mut tw = vec![i64::MAX; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        for v in 0..n {
            if s >> v & 1 == 0 {
                continue;
            }
            let rest = s & !(1 << v);
            let q = reach_outside(g, rest, v) as i64;
            tw[s] = tw[s].min(tw[rest].max(q));
        }
    }
    tw[full]
}

/// Vertices outside `inside ∪ {v}` reachable from `v` through `inside`.
fn reach_outside(g: &RuleGraph, inside: usize, v: usize) -> usize {
    let mut seen = BTreeSet::from([v]);
    let mut stack = vec![v];
    let mut found = BTreeSet::new();
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if !seen.insert(y) {
                continue;
            }
            if inside >> y & 1 == 1 {
                stack.push(y);
            } else {
                found.insert(y);
            }
        }
    }
    found.len()
}
