//! Tree decompositions of rule graphs, built from elimination orders.

mod heuristics;
mod rng;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::ast::Variable;
use crate::rulegraph::RuleGraph;

pub use heuristics::{elimination_order, Heuristic};
pub use rng::{rule_seed, Lcg};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("elimination order is not a permutation of the graph's vertices")]
    NotAPermutation,
    #[error("no bag contains all head variables {{{}}}", join(.0))]
    HeadNotCovered(Vec<Variable>),
}

fn join(vs: &[Variable]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: usize,
    pub bag: BTreeSet<Variable>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A rooted tree of bags. Node ids index `nodes`; the root is node 0
/// for every decomposition produced here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    nodes: Vec<Node>,
    root: usize,
}

impl TreeDecomposition {
    /// Assembles a decomposition from bags and a parent array. Meant for
    /// tests and hand-built trees; no validation happens here.
    ///
    /// # Panics
    /// If the parent links do not form a tree with exactly one root.
    pub fn from_parts(bags: Vec<BTreeSet<Variable>>, parents: Vec<Option<usize>>) -> Self {
        assert_eq!(bags.len(), parents.len());
        let mut nodes: Vec<Node> = bags
            .into_iter()
            .zip(&parents)
            .enumerate()
            .map(|(id, (bag, &parent))| Node {
                id,
                bag,
                parent,
                children: Vec::new(),
            })
            .collect();
        let mut root = None;
        for (id, p) in parents.iter().enumerate() {
            match p {
                Some(p) => nodes[*p].children.push(id),
                None => {
                    assert!(root.is_none(), "more than one root");
                    root = Some(id);
                }
            }
        }
        TreeDecomposition {
            nodes,
            root: root.expect("no root"),
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest bag size minus one; -1 for a single empty bag.
    pub fn width(&self) -> i64 {
        self.nodes.iter().map(|n| n.bag.len() as i64).max().unwrap_or(0) - 1
    }

    /// Distance from the root.
    pub fn depth(&self, id: usize) -> usize {
        let mut d = 0;
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            d += 1;
            cur = p;
        }
        d
    }

    /// Nodes in the subtree rooted at `id`, in preorder.
    pub fn subtree(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev());
        }
        out
    }

    /// Children before parents; the root comes last.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        self.post(self.root, &mut out);
        out
    }

    fn post(&self, id: usize, out: &mut Vec<usize>) {
        for &c in &self.nodes[id].children {
            self.post(c, out);
        }
        out.push(id);
    }

    pub fn bags(&self) -> impl Iterator<Item = &BTreeSet<Variable>> {
        self.nodes.iter().map(|n| &n.bag)
    }

    /// Renumbers nodes breadth-first from `new_root`, treating the tree
    /// as undirected; children keep ascending old-id order.
    fn rerooted(&self, new_root: usize) -> TreeDecomposition {
        let n = self.nodes.len();
        let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for node in &self.nodes {
            if let Some(p) = node.parent {
                nbrs[node.id].insert(p);
                nbrs[p].insert(node.id);
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut parent_old = vec![None; n];
        let mut queue = VecDeque::from([new_root]);
        new_id[new_root] = 0;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &nbrs[v] {
                if new_id[w] == usize::MAX {
                    new_id[w] = order.len() + queue.len();
                    parent_old[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        let bags = order.iter().map(|&v| self.nodes[v].bag.clone()).collect();
        let parents = order.iter().map(|&v| parent_old[v].map(|p| new_id[p])).collect();
        TreeDecomposition::from_parts(bags, parents)
    }
}

impl fmt::Display for TreeDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, bag) in self.bags().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str("{")?;
            f.write_str(&join(&bag.iter().cloned().collect::<Vec<_>>()))?;
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Builds the decomposition induced by eliminating vertices in `order`.
///
/// The bag of `v` is `v` plus its neighbours eliminated after it (in the
/// graph with fill edges), and its parent is the bag of the first of
/// those neighbours to be eliminated. Separate components hang below an
/// empty root. Bags contained in a neighbouring bag are then merged away.
pub fn decomposition_from_order(g: &RuleGraph, order: &[Variable]) -> Result<TreeDecomposition, TdError> {
    let n = g.len();
    let mut pos = vec![usize::MAX; n];
    if order.len() != n {
        return Err(TdError::NotAPermutation);
    }
    for (i, v) in order.iter().enumerate() {
        let idx = g.index_of(v).ok_or(TdError::NotAPermutation)?;
        if pos[idx] != usize::MAX {
            return Err(TdError::NotAPermutation);
        }
        pos[idx] = i;
    }
    if n == 0 {
        return Ok(TreeDecomposition::from_parts(vec![BTreeSet::new()], vec![None]));
    }

    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    // node i of the raw tree belongs to the i-th eliminated vertex
    let mut bags = Vec::with_capacity(n + 1);
    let mut parents: Vec<Option<usize>> = Vec::with_capacity(n + 1);
    for v in order {
        let vi = g.index_of(v).expect("checked above");
        let later = adj[vi].clone();
        let mut bag: BTreeSet<Variable> = later.iter().map(|&w| g.vertex(w).clone()).collect();
        bag.insert(v.clone());
        bags.push(bag);
        parents.push(later.iter().map(|&w| pos[w]).min());
        heuristics::eliminate(&mut adj, vi);
    }
    let roots: Vec<usize> = (0..n).filter(|&i| parents[i].is_none()).collect();
    if roots.len() > 1 {
        let synthetic = bags.len();
        bags.push(BTreeSet::new());
        parents.push(None);
        for r in roots {
            parents[r] = Some(synthetic);
        }
    }
    let td = TreeDecomposition::from_parts(bags, parents);
    let keep_root = td.nodes[td.root].bag.is_empty();
    Ok(compress(td, keep_root))
}

/// Contracts every tree edge whose bags are nested. With `keep_root`
/// the root is never merged (used for the empty component-joining root).
fn compress(td: TreeDecomposition, keep_root: bool) -> TreeDecomposition {
    let n = td.nodes.len();
    let mut bag: Vec<BTreeSet<Variable>> = td.nodes.iter().map(|x| x.bag.clone()).collect();
    let mut parent: Vec<Option<usize>> = td.nodes.iter().map(|x| x.parent).collect();
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for c in 0..n {
            if !alive[c] {
                continue;
            }
            let Some(p) = parent[c] else { continue };
            if keep_root && p == td.root {
                continue;
            }
            if bag[c].is_subset(&bag[p]) || bag[p].is_subset(&bag[c]) {
                // merge c into p
                if bag[p].is_subset(&bag[c]) {
                    bag[p] = std::mem::take(&mut bag[c]);
                }
                alive[c] = false;
                for q in parent.iter_mut() {
                    if *q == Some(c) {
                        *q = Some(p);
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let ids: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let mut remap = vec![usize::MAX; n];
    for (new, &old) in ids.iter().enumerate() {
        remap[old] = new;
    }
    let bags = ids.iter().map(|&i| bag[i].clone()).collect();
    let parents = ids.iter().map(|&i| parent[i].map(|p| remap[p])).collect();
    let t = TreeDecomposition::from_parts(bags, parents);
    let r = t.root;
    t.rerooted(r)
}

/// Checks vertex cover, edge cover and connectedness, plus that the
/// node links form a single tree.
pub fn validate(td: &TreeDecomposition, g: &RuleGraph) -> bool {
    let n = td.nodes.len();
    if n == 0 || td.root >= n || td.nodes[td.root].parent.is_some() {
        return false;
    }
    for node in &td.nodes {
        if let Some(p) = node.parent {
            if p >= n || !td.nodes[p].children.contains(&node.id) {
                return false;
            }
        } else if node.id != td.root {
            return false;
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![td.root];
    let mut count = 0;
    while let Some(v) = stack.pop() {
        if seen[v] {
            return false;
        }
        seen[v] = true;
        count += 1;
        stack.extend(&td.nodes[v].children);
    }
    if count != n {
        return false;
    }
    for v in g.vertices() {
        // nodes containing v whose parent does not: exactly one per connected piece
        let tops = td
            .nodes
            .iter()
            .filter(|x| x.bag.contains(v))
            .filter(|x| x.parent.is_none_or(|p| !td.nodes[p].bag.contains(v)))
            .count();
        if tops != 1 {
            return false;
        }
    }
    g.edges().into_iter().all(|(a, b)| {
        let (a, b) = (g.vertex(a), g.vertex(b));
        td.bags().any(|bag| bag.contains(a) && bag.contains(b))
    })
}

/// Re-roots `td` at the first node (by id) whose bag holds every head
/// variable. An empty head keeps the decomposition as it is.
pub fn ensure_head_root(td: &TreeDecomposition, head_vars: &BTreeSet<Variable>) -> Result<TreeDecomposition, TdError> {
    if head_vars.is_empty() || head_vars.is_subset(&td.nodes[td.root].bag) {
        return Ok(td.clone());
    }
    match td.nodes.iter().find(|x| head_vars.is_subset(&x.bag)) {
        Some(node) => Ok(td.rerooted(node.id)),
        None => Err(TdError::HeadNotCovered(head_vars.iter().cloned().collect())),
    }
}

/// Elimination order plus decomposition in one call.
pub fn decompose_graph(g: &RuleGraph, heuristic: Heuristic, seed: u64) -> TreeDecomposition {
    let order = elimination_order(g, heuristic, seed);
    decomposition_from_order(g, &order).expect("heuristic orders are permutations")
}
