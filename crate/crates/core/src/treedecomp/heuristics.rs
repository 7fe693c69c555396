use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::rng::Lcg;
use crate::ast::Variable;
use crate::rulegraph::RuleGraph;

/// Elimination-ordering heuristic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Heuristic {
    /// Maximum cardinality search.
    Mcs,
    /// Minimum fill-in.
    Mf,
    /// Minimum induced width (minimum degree).
    #[default]
    Miw,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [Heuristic::Mcs, Heuristic::Mf, Heuristic::Miw];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Mcs => "mcs",
            Heuristic::Mf => "mf",
            Heuristic::Miw => "miw",
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mcs" => Ok(Heuristic::Mcs),
            "mf" => Ok(Heuristic::Mf),
            "miw" => Ok(Heuristic::Miw),
            other => Err(format!("unknown heuristic `{other}` (expected mcs, mf or miw)")),
        }
    }
}

/// Picks uniformly among the indices whose score equals the best one.
/// `better(a, b)` says score `a` beats score `b`.
fn pick<S: Copy + PartialEq>(
    candidates: impl Iterator<Item = (usize, S)>,
    better: impl Fn(S, S) -> bool,
    rng: &mut Lcg,
) -> usize {
    let mut best: Option<S> = None;
    let mut ties = Vec::new();
    for (v, s) in candidates {
        match best {
            Some(b) if better(b, s) => {}
            Some(b) if b == s => ties.push(v),
            _ => {
                best = Some(s);
                ties.clear();
                ties.push(v);
            }
        }
    }
    ties[rng.below(ties.len())]
}

/// Returns an elimination order of `g`'s vertices. Ties are broken by
/// a generator seeded with `seed`, so equal inputs give equal orders.
pub fn elimination_order(g: &RuleGraph, heuristic: Heuristic, seed: u64) -> Vec<Variable> {
    let mut rng = Lcg::new(seed);
    let order = match heuristic {
        Heuristic::Mcs => mcs(g, &mut rng),
        Heuristic::Mf | Heuristic::Miw => greedy(g, heuristic, &mut rng),
    };
    order.into_iter().map(|i| g.vertex(i).clone()).collect()
}

fn mcs(g: &RuleGraph, rng: &mut Lcg) -> Vec<usize> {
    let n = g.len();
    let mut chosen = vec![false; n];
    let mut weight = vec![0usize; n];
    let mut visit = Vec::with_capacity(n);
    for _ in 0..n {
        let v = pick(
            (0..n).filter(|&v| !chosen[v]).map(|v| (v, weight[v])),
            |best, s| s < best,
            rng,
        );
        chosen[v] = true;
        visit.push(v);
        for &w in g.neighbors(v) {
            weight[w] += 1;
        }
    }
    visit.reverse();
    visit
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let ns: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in ns.iter().enumerate() {
        for &b in &ns[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

fn greedy(g: &RuleGraph, heuristic: Heuristic, rng: &mut Lcg) -> Vec<usize> {
    let n = g.len();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let score = |v: usize| match heuristic {
            Heuristic::Mf => fill_in(&adj, v),
            _ => adj[v].len(),
        };
        let v = pick(
            (0..n).filter(|&v| alive[v]).map(|v| (v, score(v))),
            |best, s| s > best,
            rng,
        );
        eliminate(&mut adj, v);
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Removes `v`, turning its neighbourhood into a clique.
pub(super) fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) {
    let ns: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
    for &a in &ns {
        adj[a].remove(&v);
        for &b in &ns {
            if a != b {
                adj[a].insert(b);
            }
        }
    }
}
