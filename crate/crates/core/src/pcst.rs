//! Prize assignment and the prize-collecting Steiner tree solver.
//!
//! The solver works on the undirected view of the graph with one uniform
//! edge cost and maximizes `Σ prizes − edge_cost × |edges|` over connected
//! subgraphs. With uniform positive costs an optimal edge set for a fixed
//! node set is any spanning tree, so every result is a tree.
//!
//! Graphs with at most [`EXACT_NODE_LIMIT`] nodes are solved exactly by
//! enumerating node subsets. Larger graphs use Goemans–Williamson style
//! moat growing followed by a strong-pruning pass over the resulting forest.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::embed::ScoredNode;
use crate::graph::{KnowledgeGraph, RelationEdge};

pub const EXACT_NODE_LIMIT: usize = 12;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PrizeAssignment {
    pub prizes: BTreeMap<String, f64>,
}

impl PrizeAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, id: impl Into<String>, prize: f64) -> &mut Self {
        self.prizes.insert(id.into(), prize);
        self
    }

    pub fn get(&self, id: &str) -> f64 {
        self.prizes.get(id).copied().unwrap_or(0.0)
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for PrizeAssignment {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        PrizeAssignment {
            prizes: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

/// `prize_r = max(score_r, 0) × (k − r + 1)` for the first `k` entries of a
/// rank-ordered list. `k` is cut down to the list length.
pub fn assign_prizes(scored: &[ScoredNode], k: usize) -> PrizeAssignment {
    let k = k.min(scored.len());
    let mut out = PrizeAssignment::new();
    for (i, s) in scored.iter().take(k).enumerate() {
        let weight = (k - i) as f64;
        let prize = if s.score > 0.0 { s.score * weight } else { 0.0 };
        out.prizes.insert(s.id.clone(), prize);
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Subgraph {
    /// Node ids in source-graph order.
    pub nodes: Vec<String>,
    /// Tree edges with their original orientation and label, sorted.
    pub edges: Vec<RelationEdge>,
    pub objective: f64,
}

impl Subgraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PcstError {
    #[error("prize assigned to unknown node `{0}`")]
    UnknownNode(String),
    #[error("prize for `{0}` must be finite and non-negative")]
    InvalidPrize(String),
    #[error("edge cost must be finite and positive, got {0}")]
    InvalidEdgeCost(f64),
}

/// Undirected simple view of a knowledge graph. Parallel edges collapse to
/// the smallest original edge; self-loops are dropped.
#[derive(Debug, Clone)]
pub struct UndirectedGraph {
    pub prizes: Vec<f64>,
    pub adjacency: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    labels: BTreeMap<(usize, usize), RelationEdge>,
}

impl UndirectedGraph {
    pub fn from_kg(kg: &KnowledgeGraph, prizes: &PrizeAssignment) -> Result<Self, PcstError> {
        let index = kg.id_index();
        let mut p = vec![0.0; kg.nodes.len()];
        for (id, &prize) in &prizes.prizes {
            let &i = index
                .get(id.as_str())
                .ok_or_else(|| PcstError::UnknownNode(id.clone()))?;
            if !prize.is_finite() || prize < 0.0 {
                return Err(PcstError::InvalidPrize(id.clone()));
            }
            p[i] = prize;
        }
        let mut labels: BTreeMap<(usize, usize), RelationEdge> = BTreeMap::new();
        for e in &kg.edges {
            let (Some(&a), Some(&b)) = (index.get(e.src.as_str()), index.get(e.dst.as_str()))
            else {
                continue;
            };
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            match labels.get(&key) {
                Some(old) if old <= e => {}
                _ => {
                    labels.insert(key, e.clone());
                }
            }
        }
        let mut adjacency = vec![Vec::new(); p.len()];
        let mut edges = Vec::with_capacity(labels.len());
        for &(a, b) in labels.keys() {
            adjacency[a].push(b);
            adjacency[b].push(a);
            edges.push((a, b));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(UndirectedGraph {
            prizes: p,
            adjacency,
            edges,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.prizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prizes.is_empty()
    }

    fn objective(&self, nodes: &[usize], edge_cost: f64) -> f64 {
        if nodes.is_empty() {
            return 0.0;
        }
        let total: f64 = nodes.iter().map(|&v| self.prizes[v]).sum();
        total - edge_cost * (nodes.len() - 1) as f64
    }

    /// Breadth-first spanning tree of the connected node set `nodes`
    /// (sorted), rooted at its smallest index.
    fn spanning_tree(&self, nodes: &[usize]) -> Vec<(usize, usize)> {
        let mut tree = Vec::new();
        let Some(&root) = nodes.first() else {
            return tree;
        };
        let mut member = vec![false; self.len()];
        for &v in nodes {
            member[v] = true;
        }
        let mut seen = vec![false; self.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if member[w] && !seen[w] {
                    seen[w] = true;
                    tree.push((v.min(w), v.max(w)));
                    queue.push_back(w);
                }
            }
        }
        tree
    }

    fn to_subgraph(
        &self,
        kg: &KnowledgeGraph,
        mut nodes: Vec<usize>,
        tree: &[(usize, usize)],
        edge_cost: f64,
    ) -> Subgraph {
        nodes.sort_unstable();
        let mut edges: Vec<RelationEdge> = tree.iter().map(|k| self.labels[k].clone()).collect();
        edges.sort();
        Subgraph {
            objective: self.objective(&nodes, edge_cost),
            nodes: nodes.iter().map(|&v| kg.nodes[v].id.clone()).collect(),
            edges,
        }
    }
}

fn check_cost(edge_cost: f64) -> Result<(), PcstError> {
    if edge_cost.is_finite() && edge_cost > 0.0 {
        Ok(())
    } else {
        Err(PcstError::InvalidEdgeCost(edge_cost))
    }
}

/// Solves the unrooted problem, exactly when the graph is small enough.
pub fn solve_pcst(
    kg: &KnowledgeGraph,
    prizes: &PrizeAssignment,
    edge_cost: f64,
) -> Result<Subgraph, PcstError> {
    if kg.nodes.len() <= EXACT_NODE_LIMIT {
        solve_exact(kg, prizes, edge_cost)
    } else {
        solve_approx(kg, prizes, edge_cost)
    }
}

/// Exhaustive search over connected node subsets.
///
/// Among optimal sets the smallest wins, then the lexicographically
/// smallest list of node positions. The empty set wins any tie at 0.
pub fn solve_exact(
    kg: &KnowledgeGraph,
    prizes: &PrizeAssignment,
    edge_cost: f64,
) -> Result<Subgraph, PcstError> {
    check_cost(edge_cost)?;
    let g = UndirectedGraph::from_kg(kg, prizes)?;
    let n = g.len();
    assert!(n < 32, "exact search is limited to small graphs");
    let masks: Vec<u32> = g
        .adjacency
        .iter()
        .map(|adj| adj.iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();

    let mut best: Vec<usize> = Vec::new();
    let mut best_value = 0.0;
    for set in 1u32..(1u32 << n) {
        let low = set.trailing_zeros() as usize;
        let mut reached = 1u32 << low;
        let mut frontier = reached;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = masks[v] & set & !reached;
            reached |= new;
            frontier |= new;
        }
        if reached != set {
            continue;
        }
        let nodes: Vec<usize> = (0..n).filter(|&v| set & (1 << v) != 0).collect();
        let value = g.objective(&nodes, edge_cost);
        let better = value > best_value
            || (value == best_value
                && !best.is_empty()
                && (nodes.len() < best.len() || (nodes.len() == best.len() && nodes < best)));
        if better {
            best_value = value;
            best = nodes;
        }
    }
    let tree = g.spanning_tree(&best);
    Ok(g.to_subgraph(kg, best, &tree, edge_cost))
}

/// Goemans–Williamson growth on the uniform-cost graph, then the best
/// connected subtree of the grown forest. Always returns a tree whose
/// objective is at least the largest single prize, or the empty subgraph.
pub fn solve_approx(
    kg: &KnowledgeGraph,
    prizes: &PrizeAssignment,
    edge_cost: f64,
) -> Result<Subgraph, PcstError> {
    check_cost(edge_cost)?;
    let g = UndirectedGraph::from_kg(kg, prizes)?;
    let forest = grow_forest(&g, edge_cost);
    let (nodes, tree) = best_subtree(&g, &forest, edge_cost);
    if nodes.is_empty() {
        return Ok(Subgraph::default());
    }
    Ok(g.to_subgraph(kg, nodes, &tree, edge_cost))
}

const EPS: f64 = 1e-12;

fn grow_forest(g: &UndirectedGraph, edge_cost: f64) -> Vec<(usize, usize)> {
    let n = g.len();
    let mut cluster: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut budget: Vec<f64> = g.prizes.clone();
    let mut active: Vec<bool> = g.prizes.iter().map(|&p| p > EPS).collect();
    // moat of v is grown[cluster[v]] + base[v].
    let mut grown = vec![0.0f64; n];
    let mut base = vec![0.0f64; n];
    let mut live: Vec<usize> = (0..n).filter(|&c| active[c]).collect();
    let mut open: Vec<(usize, usize)> = g.edges.clone();
    let mut forest = Vec::new();

    loop {
        let mut step = f64::INFINITY;
        let mut event: Option<(usize, usize)> = None;
        let mut retire: Option<usize> = None;
        for &c in &live {
            if budget[c] < step {
                step = budget[c];
                retire = Some(c);
            }
        }
        if retire.is_none() {
            break;
        }
        open.retain(|&(a, b)| cluster[a] != cluster[b]);
        for &(a, b) in &open {
            let (ca, cb) = (cluster[a], cluster[b]);
            let slack = edge_cost - grown[ca] - base[a] - grown[cb] - base[b];
            let t = match (active[ca], active[cb]) {
                (true, true) => slack / 2.0,
                (true, false) | (false, true) => slack,
                (false, false) => continue,
            };
            let t = t.max(0.0);
            if t < step {
                step = t;
                event = Some((a, b));
            }
        }

        for &c in &live {
            budget[c] -= step;
            grown[c] += step;
        }

        match event {
            Some((a, b)) => {
                let (ca, cb) = (cluster[a], cluster[b]);
                let (keep, gone) = if members[ca].len() >= members[cb].len() {
                    (ca, cb)
                } else {
                    (cb, ca)
                };
                let moved = core::mem::take(&mut members[gone]);
                for &v in &moved {
                    cluster[v] = keep;
                    base[v] += grown[gone] - grown[keep];
                }
                members[keep].extend(moved);
                budget[keep] += budget[gone];
                budget[gone] = 0.0;
                active[gone] = false;
                active[keep] = budget[keep] > EPS;
                forest.push((a.min(b), a.max(b)));
            }
            None => {
                if let Some(c) = retire {
                    active[c] = false;
                }
            }
        }
        live.retain(|&c| active[c]);
        if let Some((a, _)) = event {
            let c = cluster[a];
            if active[c] && !live.contains(&c) {
                live.push(c);
            }
        }
    }
    forest
}

/// Strong pruning: for each tree of the forest, the connected subtree with
/// the largest `Σ prizes − edge_cost × |edges|`.
fn best_subtree(
    g: &UndirectedGraph,
    forest: &[(usize, usize)],
    edge_cost: f64,
) -> (Vec<usize>, Vec<(usize, usize)>) {
    let n = g.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in forest {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut i = start;
        while i < order.len() {
            let v = order[i];
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    let mut down = g.prizes.clone();
    for &v in order.iter().rev() {
        if parent[v] != usize::MAX {
            let gain = down[v] - edge_cost;
            if gain > 0.0 {
                down[parent[v]] += gain;
            }
        }
    }
    let mut best = None;
    let mut best_value = 0.0;
    for (v, &value) in down.iter().enumerate() {
        if value > best_value {
            best_value = value;
            best = Some(v);
        }
    }
    let Some(top) = best else {
        return (Vec::new(), Vec::new());
    };
    let mut nodes = vec![top];
    let mut tree = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let v = nodes[i];
        for &w in &adj[v] {
            if parent[w] == v && down[w] - edge_cost > 0.0 {
                nodes.push(w);
                tree.push((v.min(w), v.max(w)));
            }
        }
        i += 1;
    }
    (nodes, tree)
}
