//! Query-time retrieval: embed, rank, prize, solve, textualize.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::time::Duration;

use serde::{Deserialize, Serialize};

use crate::embed::{embed_query, top_k, EmbedError, EmbeddingProvider, ScoredNode, VectorIndex};
use crate::graph::{node_text, KnowledgeGraph, RelationEdge};
use crate::pcst::{assign_prizes, solve_pcst, PcstError, PrizeAssignment, Subgraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrieverConfig {
    pub k: usize,
    pub edge_cost: f64,
    pub size_cap: Option<usize>,
}

impl Default for RetrieverConfig {
    fn default() -> Self {
        RetrieverConfig {
            k: 8,
            edge_cost: 1.0,
            size_cap: None,
        }
    }
}

impl RetrieverConfig {
    pub fn validate(&self) -> Result<(), RetrieveError> {
        if self.k == 0 {
            return Err(RetrieveError::Config("k must be at least 1"));
        }
        if !(self.edge_cost.is_finite() && self.edge_cost > 0.0) {
            return Err(RetrieveError::Config(
                "edge cost must be finite and positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RetrieveError {
    #[error("invalid retriever configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Pcst(#[from] PcstError),
}

/// Monotonic time source for stage timings.
pub trait Clock {
    fn now(&self) -> Duration;
}

/// Always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTimings {
    pub embed: Duration,
    pub top_k: Duration,
    pub prizes: Duration,
    pub pcst: Duration,
    pub textualize: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub subgraph: Subgraph,
    pub context: String,
    pub scored: Vec<ScoredNode>,
    pub prizes: PrizeAssignment,
    pub timings: StageTimings,
}

/// Renders a subgraph as
///
/// ```text
/// Nodes:
/// <node_text>        one line per node, by id
/// Edges:
/// (<src name>, <relation>, <dst name>)   by (src, relation, dst)
/// ```
///
/// Newlines inside node texts are flattened to spaces so that every node
/// stays on one line.
pub fn textualize<'a>(sub: &'a Subgraph, kg: &'a KnowledgeGraph) -> String {
    let index = kg.id_index();
    let name =
        |id: &'a str| -> &'a str { index.get(id).map_or(id, |&i| kg.nodes[i].name.as_str()) };
    let mut ids: Vec<&str> = sub.nodes.iter().map(String::as_str).collect();
    ids.sort_unstable();
    let mut out = String::from("Nodes:\n");
    for id in ids {
        let line = match index.get(id) {
            Some(&i) => node_text(&kg.nodes[i]),
            None => String::from(id),
        };
        for (i, part) in line.lines().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(part);
        }
        out.push('\n');
    }
    out.push_str("Edges:\n");
    let mut edges: Vec<&RelationEdge> = sub.edges.iter().collect();
    edges.sort();
    for e in edges {
        out.push('(');
        out.push_str(name(&e.src));
        out.push_str(", ");
        out.push_str(&e.relation);
        out.push_str(", ");
        out.push_str(name(&e.dst));
        out.push_str(")\n");
    }
    out
}

/// Keeps at most `cap` nodes of a tree: starts at the highest-prize node and
/// repeatedly adds the highest-prize neighbor along tree edges (ties by id).
pub fn cap_subgraph(
    sub: &Subgraph,
    prizes: &PrizeAssignment,
    cap: usize,
    edge_cost: f64,
) -> Subgraph {
    if sub.nodes.len() <= cap {
        return sub.clone();
    }
    if cap == 0 {
        return Subgraph::default();
    }
    let better = |a: &str, b: &str| {
        let (pa, pb) = (prizes.get(a), prizes.get(b));
        pa > pb || (pa == pb && a < b)
    };
    let mut start = sub.nodes[0].as_str();
    for id in &sub.nodes {
        if better(id, start) {
            start = id;
        }
    }
    let mut kept: Vec<&str> = alloc::vec![start];
    let mut edges: Vec<RelationEdge> = Vec::new();
    while kept.len() < cap {
        let mut pick: Option<(&str, &RelationEdge)> = None;
        for e in &sub.edges {
            let (s, d) = (e.src.as_str(), e.dst.as_str());
            let candidate = match (kept.contains(&s), kept.contains(&d)) {
                (true, false) => d,
                (false, true) => s,
                _ => continue,
            };
            if pick.is_none_or(|(p, _)| better(candidate, p)) {
                pick = Some((candidate, e));
            }
        }
        let Some((id, e)) = pick else { break };
        kept.push(id);
        edges.push(e.clone());
    }
    let order: BTreeMap<&str, usize> = sub
        .nodes
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    kept.sort_by_key(|id| order[id]);
    edges.sort();
    let total: f64 = kept.iter().map(|id| prizes.get(id)).sum();
    Subgraph {
        objective: total - edge_cost * edges.len() as f64,
        nodes: kept.into_iter().map(String::from).collect(),
        edges,
    }
}

/// [`retrieve_timed`] without timings.
pub fn retrieve(
    kg: &KnowledgeGraph,
    index: &VectorIndex,
    query: &str,
    config: &RetrieverConfig,
    provider: &dyn EmbeddingProvider,
) -> Result<RetrievalResult, RetrieveError> {
    retrieve_timed(kg, index, query, config, provider, &NullClock)
}

pub fn retrieve_timed(
    kg: &KnowledgeGraph,
    index: &VectorIndex,
    query: &str,
    config: &RetrieverConfig,
    provider: &dyn EmbeddingProvider,
    clock: &dyn Clock,
) -> Result<RetrievalResult, RetrieveError> {
    config.validate()?;
    let mut timings = StageTimings::default();
    if index.is_empty() || kg.is_empty() {
        let subgraph = Subgraph::default();
        return Ok(RetrievalResult {
            context: textualize(&subgraph, kg),
            subgraph,
            scored: Vec::new(),
            prizes: PrizeAssignment::new(),
            timings,
        });
    }
    let mut mark = clock.now();
    let mut lap = |slot: &mut Duration| {
        let now = clock.now();
        *slot = now.saturating_sub(mark);
        mark = now;
    };
    let q = embed_query(provider, query)?;
    lap(&mut timings.embed);
    let scored = top_k(index, &q, config.k)?;
    lap(&mut timings.top_k);
    let prizes = assign_prizes(&scored, config.k);
    lap(&mut timings.prizes);
    let mut subgraph = solve_pcst(kg, &prizes, config.edge_cost)?;
    if let Some(cap) = config.size_cap {
        subgraph = cap_subgraph(&subgraph, &prizes, cap, config.edge_cost);
    }
    lap(&mut timings.pcst);
    let context = textualize(&subgraph, kg);
    lap(&mut timings.textualize);
    Ok(RetrievalResult {
        subgraph,
        context,
        scored,
        prizes,
        timings,
    })
}
