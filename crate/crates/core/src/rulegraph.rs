//! The variable graph of a rule: its Gaifman graph, plus a clique for
//! every comparison, arithmetic binding and aggregate.

use std::collections::BTreeSet;

use crate::ast::{Rule, Variable, Vars};

/// Undirected simple graph over variable names. Vertices keep the order
/// in which they were added, which makes every traversal deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleGraph {
    vertices: Vec<Variable>,
    adj: Vec<BTreeSet<usize>>,
}

impl RuleGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from vertex names and edges given by name.
    ///
    /// # Panics
    /// If an edge mentions a name not listed in `vertices`.
    pub fn from_edges(vertices: &[&str], edges: &[(&str, &str)]) -> Self {
        let mut g = RuleGraph::new();
        for v in vertices {
            g.add_vertex(Variable::from(*v));
        }
        for (a, b) in edges {
            let a = g.index_of(&Variable::from(*a)).expect("edge endpoint is a vertex");
            let b = g.index_of(&Variable::from(*b)).expect("edge endpoint is a vertex");
            g.add_edge(a, b);
        }
        g
    }

    /// Adds `v` unless present; returns its index.
    pub fn add_vertex(&mut self, v: Variable) -> usize {
        if let Some(i) = self.index_of(&v) {
            return i;
        }
        self.vertices.push(v);
        self.adj.push(BTreeSet::new());
        self.vertices.len() - 1
    }

    /// Adds the edge `{a, b}`; self-loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    /// Connects every pair of the given variables that are vertices.
    pub fn add_clique<'a>(&mut self, vars: impl IntoIterator<Item = &'a Variable>) {
        let idx: Vec<usize> = vars.into_iter().filter_map(|v| self.index_of(v)).collect();
        for (i, &a) in idx.iter().enumerate() {
            for &b in &idx[i + 1..] {
                self.add_edge(a, b);
            }
        }
    }

    pub fn index_of(&self, v: &Variable) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    pub fn vertices(&self) -> &[Variable] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Variable {
        &self.vertices[i]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.adj[i]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ns) in self.adj.iter().enumerate() {
            out.extend(ns.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    /// Edges by name, each pair sorted by name.
    pub fn named_edges(&self) -> BTreeSet<(Variable, Variable)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| {
                let (x, y) = (self.vertices[a].clone(), self.vertices[b].clone());
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.len();
        self.edge_count() == n * n.saturating_sub(1) / 2
    }
}

/// Builds the variable graph of `rule`.
///
/// Vertices are the rule's global variables, in order of first
/// occurrence. Every body element contributes a clique over its global
/// variables. Head variables (and weak annotation variables) form one
/// extra clique when `include_head_clique` is set.
pub fn build(rule: &Rule, include_head_clique: bool) -> RuleGraph {
    let mut g = RuleGraph::new();
    for v in rule.ordered_global_vars() {
        g.add_vertex(v);
    }
    let globals = rule.global_vars();
    for e in &rule.body {
        g.add_clique(&e.global_vars(&globals));
    }
    if include_head_clique {
        let mut head = rule.head_vars();
        if let Some(w) = &rule.weak {
            head.extend(w.vars());
        }
        g.add_clique(&head);
    }
    g
}
