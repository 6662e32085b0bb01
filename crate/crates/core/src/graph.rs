//! Knowledge-graph data model.
//!
//! A [`KnowledgeGraph`] is an ordered list of nodes plus an ordered list of
//! labeled, directed edges. Order matters: it is what makes the CSV output
//! byte-stable. The graph is plain data; [`validate_graph`] reports every
//! broken invariant instead of failing on the first one.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Edge label linking an entity to the chunk it was extracted from.
pub const MENTIONED_IN: &str = "MENTIONED_IN";

/// Class name given to chunk nodes.
pub const CHUNK_CLASS: &str = "Chunk";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Entity,
    Chunk,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Entity => "entity",
            NodeKind::Chunk => "chunk",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "entity" => Some(NodeKind::Entity),
            "chunk" => Some(NodeKind::Chunk),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityNode {
    pub id: String,
    pub name: String,
    pub class: String,
    pub kind: NodeKind,
    /// Entity description, or the full chunk text for chunk nodes.
    pub text: String,
    /// Key/value pairs in insertion order.
    pub attributes: Vec<(String, String)>,
}

impl EntityNode {
    pub fn entity(
        id: impl Into<String>,
        name: impl Into<String>,
        class: impl Into<String>,
    ) -> Self {
        EntityNode {
            id: id.into(),
            name: name.into(),
            class: class.into(),
            kind: NodeKind::Entity,
            text: String::new(),
            attributes: Vec::new(),
        }
    }

    pub fn chunk(id: impl Into<String>, text: impl Into<String>) -> Self {
        let id = id.into();
        EntityNode {
            name: id.clone(),
            id,
            class: CHUNK_CLASS.to_string(),
            kind: NodeKind::Chunk,
            text: text.into(),
            attributes: Vec::new(),
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = text.into();
        self
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.push((key.into(), value.into()));
        self
    }

    pub fn attribute(&self, key: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationEdge {
    pub src: String,
    pub relation: String,
    pub dst: String,
}

impl RelationEdge {
    pub fn new(
        src: impl Into<String>,
        relation: impl Into<String>,
        dst: impl Into<String>,
    ) -> Self {
        RelationEdge {
            src: src.into(),
            relation: relation.into(),
            dst: dst.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeGraph {
    pub nodes: Vec<EntityNode>,
    pub edges: Vec<RelationEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("edge ({src}, {relation}, {dst}) references unknown node `{missing}`")]
    UnknownNode {
        src: String,
        relation: String,
        dst: String,
        missing: String,
    },
    #[error("node `{0}` is not valid: {1}")]
    InvalidNode(String, &'static str),
    #[error("edge relation must not be empty")]
    EmptyRelation,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&EntityNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Map from node id to its position in `nodes`. First occurrence wins.
    pub fn id_index(&self) -> BTreeMap<&str, usize> {
        let mut map = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            map.entry(n.id.as_str()).or_insert(i);
        }
        map
    }

    /// Appends a node after checking the node-level invariants and id uniqueness.
    pub fn add_node(&mut self, node: EntityNode) -> Result<(), GraphError> {
        if let Some(reason) = node_problem(&node) {
            return Err(GraphError::InvalidNode(node.id, reason));
        }
        if self.node(&node.id).is_some() {
            return Err(GraphError::DuplicateNode(node.id));
        }
        self.nodes.push(node);
        Ok(())
    }

    /// Appends an edge unless the same triple is already present.
    /// Returns whether the edge was inserted.
    pub fn add_edge(&mut self, edge: RelationEdge) -> Result<bool, GraphError> {
        if edge.relation.is_empty() {
            return Err(GraphError::EmptyRelation);
        }
        for end in [&edge.src, &edge.dst] {
            if self.node(end).is_none() {
                return Err(GraphError::UnknownNode {
                    missing: end.clone(),
                    src: edge.src.clone(),
                    relation: edge.relation.clone(),
                    dst: edge.dst.clone(),
                });
            }
        }
        if self.edges.contains(&edge) {
            return Ok(false);
        }
        self.edges.push(edge);
        Ok(true)
    }

    /// The graph without chunk nodes and without edges touching them.
    pub fn entity_view(&self) -> KnowledgeGraph {
        let nodes: Vec<EntityNode> = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Entity)
            .cloned()
            .collect();
        let keep: BTreeMap<&str, ()> = nodes.iter().map(|n| (n.id.as_str(), ())).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| {
                e.relation != MENTIONED_IN
                    && keep.contains_key(e.src.as_str())
                    && keep.contains_key(e.dst.as_str())
            })
            .cloned()
            .collect();
        KnowledgeGraph { nodes, edges }
    }
}

fn node_problem(node: &EntityNode) -> Option<&'static str> {
    if node.id.is_empty() {
        return Some("empty id");
    }
    match node.kind {
        NodeKind::Chunk if node.text.is_empty() => return Some("chunk node without text"),
        NodeKind::Entity if node.class.is_empty() => return Some("entity node without class"),
        _ => {}
    }
    let mut seen: Vec<&str> = Vec::new();
    for (k, _) in &node.attributes {
        if k.is_empty() || k.contains('=') || k.contains('|') {
            return Some("attribute key is empty or contains `=` or `|`");
        }
        if seen.contains(&k.as_str()) {
            return Some("duplicate attribute key");
        }
        seen.push(k);
    }
    None
}

/// Text embedded for a node and printed in retrieval contexts.
///
/// Entities render as `<name> (<class>). <text>` followed by `; key: value`
/// for every attribute. The `. <text>` part is dropped when the text is
/// empty. Chunks render as `Chunk: <text>`.
pub fn node_text(node: &EntityNode) -> String {
    if node.kind == NodeKind::Chunk {
        let mut out = String::with_capacity(node.text.len() + 7);
        out.push_str("Chunk: ");
        out.push_str(&node.text);
        return out;
    }
    let mut out = String::new();
    out.push_str(&node.name);
    out.push_str(" (");
    out.push_str(&node.class);
    out.push_str(").");
    if !node.text.is_empty() {
        out.push(' ');
        out.push_str(&node.text);
    }
    for (k, v) in &node.attributes {
        out.push_str("; ");
        out.push_str(k);
        out.push_str(": ");
        out.push_str(v);
    }
    out
}

/// One broken invariant. Rows are 1-based positions in `nodes` / `edges`,
/// which is also the data-row number in the CSV files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InvalidNode {
        row: usize,
        id: String,
        reason: &'static str,
    },
    DuplicateNodeId {
        id: String,
        first_row: usize,
        row: usize,
    },
    EmptyRelation {
        row: usize,
    },
    UnknownEndpoint {
        row: usize,
        id: String,
    },
    DuplicateEdge {
        first_row: usize,
        row: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidNode { row, id, reason } => {
                write!(f, "node row {row} (`{id}`): {reason}")
            }
            Violation::DuplicateNodeId { id, first_row, row } => {
                write!(f, "node id `{id}` appears in rows {first_row} and {row}")
            }
            Violation::EmptyRelation { row } => write!(f, "edge row {row}: empty relation"),
            Violation::UnknownEndpoint { row, id } => {
                write!(f, "edge row {row}: unknown node id `{id}`")
            }
            Violation::DuplicateEdge { first_row, row } => {
                write!(f, "edge rows {first_row} and {row} are the same triple")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_graph(kg: &KnowledgeGraph) -> ValidationReport {
    let mut violations = Vec::new();
    let mut first_row: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, node) in kg.nodes.iter().enumerate() {
        let row = i + 1;
        if let Some(reason) = node_problem(node) {
            violations.push(Violation::InvalidNode {
                row,
                id: node.id.clone(),
                reason,
            });
        }
        if let Some(&first) = first_row.get(node.id.as_str()) {
            violations.push(Violation::DuplicateNodeId {
                id: node.id.clone(),
                first_row: first,
                row,
            });
        } else {
            first_row.insert(&node.id, row);
        }
    }
    let mut seen_edges: BTreeMap<&RelationEdge, usize> = BTreeMap::new();
    for (i, edge) in kg.edges.iter().enumerate() {
        let row = i + 1;
        if edge.relation.is_empty() {
            violations.push(Violation::EmptyRelation { row });
        }
        for end in [&edge.src, &edge.dst] {
            if !first_row.contains_key(end.as_str()) {
                violations.push(Violation::UnknownEndpoint {
                    row,
                    id: end.clone(),
                });
            }
        }
        if let Some(&first) = seen_edges.get(edge) {
            violations.push(Violation::DuplicateEdge {
                first_row: first,
                row,
            });
        } else {
            seen_edges.insert(edge, row);
        }
    }
    ValidationReport { violations }
}

/// Flattens attributes into the single `attributes` CSV column:
/// `key=value` pairs joined by `|`, with `\`, `|` and `=` backslash-escaped.
pub fn encode_attributes(attributes: &[(String, String)]) -> String {
    let mut out = String::new();
    for (i, (k, v)) in attributes.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        escape_into(&mut out, k);
        out.push('=');
        escape_into(&mut out, v);
    }
    out
}

fn escape_into(out: &mut String, s: &str) {
    for c in s.chars() {
        if matches!(c, '\\' | '|' | '=') {
            out.push('\\');
        }
        out.push(c);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed attribute list: {0}")]
pub struct AttributeError(pub &'static str);

/// Inverse of [`encode_attributes`].
pub fn decode_attributes(s: &str) -> Result<Vec<(String, String)>, AttributeError> {
    let mut out = Vec::new();
    if s.is_empty() {
        return Ok(out);
    }
    let mut key = String::new();
    let mut value = String::new();
    let mut in_value = false;
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        let target = if in_value { &mut value } else { &mut key };
        match c {
            '\\' => match chars.next() {
                Some(n) => target.push(n),
                None => return Err(AttributeError("dangling escape")),
            },
            '=' if !in_value => in_value = true,
            '=' => return Err(AttributeError("unescaped `=` in value")),
            '|' => {
                if !in_value {
                    return Err(AttributeError("pair without `=`"));
                }
                out.push((core::mem::take(&mut key), core::mem::take(&mut value)));
                in_value = false;
            }
            c => target.push(c),
        }
    }
    if !in_value {
        return Err(AttributeError("pair without `=`"));
    }
    out.push((key, value));
    Ok(out)
}
