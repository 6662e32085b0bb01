//! Ontology-constrained knowledge-graph construction.
//!
//! Each chunk of the corpus is sent to the LLM with the ontology's allowed
//! class and relation names. Answers use a line format (`name|Class` and
//! `source|RELATION|target`); anything outside the constraint lists is
//! rejected rather than added. Per-chunk results are assembled in chunk
//! order, so the graph does not depend on the order extractions finish in.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chunk::{chunk_text, Chunk, ChunkingConfig};
use crate::graph::{EntityNode, GraphError, KnowledgeGraph, RelationEdge, MENTIONED_IN};
use crate::learn::strip_code_fence;
use crate::llm::{LlmClient, LlmError, LlmRequest};
use crate::prompts;
use crate::text::slugify;
use crate::turtle::{extract_constraints, ConstraintSet, OntologyGraph};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtractedNode {
    pub name: String,
    pub class: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtractedEdge {
    pub src: String,
    pub relation: String,
    pub dst: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    ClassNotAllowed,
    RelationNotAllowed,
    UnknownEndpoint,
    Unparseable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    pub item: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub nodes: Vec<ExtractedNode>,
    pub edges: Vec<ExtractedEdge>,
    pub rejected: Vec<Rejected>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KgError {
    #[error("the ontology yields no allowed classes or no allowed relations")]
    EmptyConstraints,
    #[error("chunk {chunk}: {source}")]
    Client { chunk: String, source: LlmError },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug)]
enum Line<'a> {
    Node(&'a str, &'a str),
    Edge(&'a str, &'a str, &'a str),
}

/// Splits a response into item lines; the second value lists malformed lines.
fn parse_lines(response: &str) -> (Vec<Line<'_>>, Vec<&str>) {
    let mut items = Vec::new();
    let mut bad = Vec::new();
    for raw in strip_code_fence(response).lines() {
        let line = raw.trim();
        let line = line
            .strip_prefix("- ")
            .or_else(|| line.strip_prefix("* "))
            .unwrap_or(line)
            .trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty()) {
            bad.push(line);
            continue;
        }
        match parts.as_slice() {
            [name, class] => items.push(Line::Node(name, class)),
            [src, rel, dst] => items.push(Line::Edge(src, rel, dst)),
            _ => bad.push(line),
        }
    }
    (items, bad)
}

fn join_names(names: &BTreeSet<String>) -> String {
    names
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

fn filter_lines(lines: Vec<Line<'_>>, constraints: &ConstraintSet) -> ExtractionResult {
    let mut result = ExtractionResult::default();
    for line in &lines {
        if let Line::Node(name, class) = line {
            if !constraints.allows_class(class) {
                result.rejected.push(Rejected {
                    item: format!("{name}|{class}"),
                    reason: RejectReason::ClassNotAllowed,
                });
                continue;
            }
            let node = ExtractedNode {
                name: name.to_string(),
                class: class.to_string(),
            };
            if !result.nodes.contains(&node) {
                result.nodes.push(node);
            }
        }
    }
    for line in &lines {
        if let Line::Edge(src, rel, dst) = line {
            let item = format!("{src}|{rel}|{dst}");
            let reason = if !constraints.allows_relation(rel) {
                Some(RejectReason::RelationNotAllowed)
            } else if ![src, dst]
                .iter()
                .all(|end| result.nodes.iter().any(|n| n.name == **end))
            {
                Some(RejectReason::UnknownEndpoint)
            } else {
                None
            };
            if let Some(reason) = reason {
                result.rejected.push(Rejected { item, reason });
                continue;
            }
            let edge = ExtractedEdge {
                src: src.to_string(),
                relation: rel.to_string(),
                dst: dst.to_string(),
            };
            if !result.edges.contains(&edge) {
                result.edges.push(edge);
            }
        }
    }
    result
}

/// Extracts constrained entities and relations from one chunk.
pub fn extract_graph(
    chunk: &Chunk,
    constraints: &ConstraintSet,
    client: &dyn LlmClient,
) -> Result<ExtractionResult, KgError> {
    if constraints.allowed_classes.is_empty() || constraints.allowed_relations.is_empty() {
        return Err(KgError::EmptyConstraints);
    }
    let classes = join_names(&constraints.allowed_classes);
    let relations = join_names(&constraints.allowed_relations);
    let client_err = |source| KgError::Client {
        chunk: chunk.id.clone(),
        source,
    };
    let prompt = prompts::render(
        prompts::KG_EXTRACT,
        &[
            ("classes", &classes),
            ("relations", &relations),
            ("text", &chunk.text),
        ],
    );
    let response = client
        .complete(&LlmRequest::new(prompt))
        .map_err(client_err)?;
    let (lines, bad) = parse_lines(&response);
    if bad.is_empty() {
        return Ok(filter_lines(lines, constraints));
    }
    let bad_lines = bad.join("\n");
    let repair = prompts::render(
        prompts::KG_REPAIR,
        &[
            ("bad_lines", &bad_lines),
            ("classes", &classes),
            ("relations", &relations),
            ("response", &response),
        ],
    );
    let repaired = client
        .complete(&LlmRequest::new(repair))
        .map_err(client_err)?;
    let (lines, bad) = parse_lines(&repaired);
    if bad.is_empty() {
        return Ok(filter_lines(lines, constraints));
    }
    Ok(ExtractionResult {
        rejected: [response, repaired]
            .into_iter()
            .map(|item| Rejected {
                item,
                reason: RejectReason::Unparseable,
            })
            .collect(),
        ..ExtractionResult::default()
    })
}

/// Adds one chunk node per chunk and a `MENTIONED_IN` edge from every
/// mentioned node to its chunk.
pub fn attach_chunks(
    kg: &KnowledgeGraph,
    chunks: &[Chunk],
    mentions: &BTreeMap<String, Vec<String>>,
) -> Result<KnowledgeGraph, KgError> {
    let mut out = kg.clone();
    for chunk in chunks {
        let node = EntityNode::chunk(chunk.id.clone(), chunk.text.clone())
            .with_attribute("source", chunk.source.clone())
            .with_attribute("start", chunk.start.to_string())
            .with_attribute("end", chunk.end.to_string());
        out.add_node(node)?;
    }
    for chunk in chunks {
        for entity in mentions.get(&chunk.id).into_iter().flatten() {
            out.add_edge(RelationEdge::new(
                entity.clone(),
                MENTIONED_IN,
                chunk.id.clone(),
            ))?;
        }
    }
    Ok(out)
}

/// A chunk together with what was extracted from it. `order` fixes the
/// chunk's position in the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkExtraction {
    pub order: usize,
    pub chunk: Chunk,
    pub result: ExtractionResult,
}

/// Builds the graph from per-chunk extractions, in `order` regardless of
/// the order of `extractions`.
///
/// Nodes are deduplicated by (name, class) and get ids
/// `<slug(name)>-<slug(class)>`, with `-2`, `-3`, ... on collisions. An
/// edge endpoint resolves to the first node of that name in its chunk.
pub fn assemble_graph(
    extractions: &[ChunkExtraction],
    with_chunks: bool,
) -> Result<KnowledgeGraph, KgError> {
    let mut sorted: Vec<&ChunkExtraction> = extractions.iter().collect();
    sorted.sort_by_key(|e| e.order);

    let mut kg = KnowledgeGraph::new();
    let mut ids: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut mentions: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for ex in &sorted {
        let mut chunk_ids = Vec::new();
        for n in &ex.result.nodes {
            let key = (n.name.clone(), n.class.clone());
            let id = match ids.get(&key) {
                Some(id) => id.clone(),
                None => {
                    let mut base = slugify(&n.name);
                    if base.is_empty() {
                        base.push_str("node");
                    }
                    base.push('-');
                    base.push_str(&slugify(&n.class));
                    let mut id = base.clone();
                    let mut suffix = 2;
                    while taken.contains(&id) {
                        id = format!("{base}-{suffix}");
                        suffix += 1;
                    }
                    taken.insert(id.clone());
                    ids.insert(key, id.clone());
                    kg.add_node(EntityNode::entity(
                        id.clone(),
                        n.name.clone(),
                        n.class.clone(),
                    ))?;
                    id
                }
            };
            if !chunk_ids.contains(&id) {
                chunk_ids.push(id);
            }
        }
        let resolve = |name: &str| {
            ex.result
                .nodes
                .iter()
                .find(|n| n.name == name)
                .and_then(|n| ids.get(&(n.name.clone(), n.class.clone())))
                .cloned()
        };
        for e in &ex.result.edges {
            if let (Some(src), Some(dst)) = (resolve(&e.src), resolve(&e.dst)) {
                kg.add_edge(RelationEdge::new(src, e.relation.clone(), dst))?;
            }
        }
        mentions.insert(ex.chunk.id.clone(), chunk_ids);
    }
    if !with_chunks {
        return Ok(kg);
    }
    let chunks: Vec<Chunk> = sorted.iter().map(|e| e.chunk.clone()).collect();
    attach_chunks(&kg, &chunks, &mentions)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// Chunks every document, extracts from every chunk and assembles the graph.
pub fn build_kg(
    corpus: &[Document],
    ontology: &OntologyGraph,
    client: &dyn LlmClient,
    with_chunks: bool,
    config: &ChunkingConfig,
) -> Result<KnowledgeGraph, KgError> {
    let extractions = extract_corpus(corpus, ontology, client, config)?;
    assemble_graph(&extractions, with_chunks)
}

/// The extraction half of [`build_kg`], so that both graph variants can be
/// assembled from one set of LLM answers.
pub fn extract_corpus(
    corpus: &[Document],
    ontology: &OntologyGraph,
    client: &dyn LlmClient,
    config: &ChunkingConfig,
) -> Result<Vec<ChunkExtraction>, KgError> {
    let constraints = extract_constraints(ontology);
    if constraints.allowed_classes.is_empty() || constraints.allowed_relations.is_empty() {
        return Err(KgError::EmptyConstraints);
    }
    let mut out = Vec::new();
    for doc in corpus {
        for chunk in chunk_text(&doc.id, &doc.text, config) {
            let result = extract_graph(&chunk, &constraints, client)?;
            out.push(ChunkExtraction {
                order: out.len(),
                chunk,
                result,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeKind;
    use crate::llm::{ScriptRule, ScriptedClient};
    use crate::turtle::parse_turtle;
    use alloc::vec;

    fn constraints() -> ConstraintSet {
        ConstraintSet {
            allowed_classes: ["Organization", "Person", "Grant"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            allowed_relations: ["FOUNDED_BY", "RECEIVED"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }

    fn chunk(id: &str, text: &str) -> Chunk {
        Chunk {
            id: id.into(),
            text: text.into(),
            start: 0,
            end: text.chars().count(),
            source: "d".into(),
        }
    }

    #[test]
    fn one_allowed_node() {
        let client = ScriptedClient::new([ScriptRule::new("", ["Granter.ai|Organization"])]);
        let r = extract_graph(&chunk("c", "text"), &constraints(), &client).unwrap();
        assert_eq!(
            r.nodes,
            vec![ExtractedNode {
                name: "Granter.ai".into(),
                class: "Organization".into()
            }]
        );
        assert!(r.rejected.is_empty());
    }

    #[test]
    fn disallowed_class_is_rejected() {
        let client = ScriptedClient::new([ScriptRule::new("", ["Zorg|Alien"])]);
        let r = extract_graph(&chunk("c", "text"), &constraints(), &client).unwrap();
        assert!(r.nodes.is_empty());
        assert_eq!(
            r.rejected,
            vec![Rejected {
                item: "Zorg|Alien".into(),
                reason: RejectReason::ClassNotAllowed
            }]
        );
    }

    #[test]
    fn nodes_and_edge() {
        let response = "```\nGranter.ai|Organization\n\n- Ana|Person\nGranter.ai|FOUNDED_BY|Ana\nGranter.ai|LIKES|Ana\nGranter.ai|RECEIVED|Voucher\n```";
        let client = ScriptedClient::new([ScriptRule::new("", [response])]);
        let r = extract_graph(&chunk("c", "text"), &constraints(), &client).unwrap();
        assert_eq!(r.nodes.len(), 2);
        assert_eq!(r.edges.len(), 1);
        assert_eq!(r.edges[0].relation, "FOUNDED_BY");
        let reasons: Vec<_> = r.rejected.iter().map(|x| x.reason).collect();
        assert_eq!(
            reasons,
            vec![
                RejectReason::RelationNotAllowed,
                RejectReason::UnknownEndpoint
            ]
        );
    }

    #[test]
    fn malformed_answer_gets_one_repair() {
        let client = ScriptedClient::new([
            ScriptRule::new("could not be parsed", ["Granter.ai|Organization"]),
            ScriptRule::new("", ["Here are the entities:"]),
        ]);
        let r = extract_graph(&chunk("c", "text"), &constraints(), &client).unwrap();
        assert_eq!(r.nodes.len(), 1);
        assert_eq!(client.calls(), 2);

        let hopeless = ScriptedClient::new([ScriptRule::new("", ["no pipes here"])]);
        let r = extract_graph(&chunk("c", "text"), &constraints(), &hopeless).unwrap();
        assert!(r.nodes.is_empty() && r.edges.is_empty());
        assert_eq!(r.rejected.len(), 2);
        assert_eq!(r.rejected[0].item, "no pipes here");
        assert_eq!(r.rejected[0].reason, RejectReason::Unparseable);
    }

    #[test]
    fn empty_constraints_are_an_error() {
        let client = ScriptedClient::new([]);
        assert_eq!(
            extract_graph(&chunk("c", "t"), &ConstraintSet::default(), &client),
            Err(KgError::EmptyConstraints)
        );
    }

    #[test]
    fn attach_chunks_counts() {
        let mut kg = KnowledgeGraph::new();
        kg.add_node(EntityNode::entity("g", "Granter.ai", "Organization"))
            .unwrap();
        assert_eq!(attach_chunks(&kg, &[], &BTreeMap::new()).unwrap(), kg);
        let mut mentions = BTreeMap::new();
        mentions.insert("d#0".to_string(), vec!["g".to_string()]);
        let out = attach_chunks(&kg, &[chunk("d#0", "Granter.ai text")], &mentions).unwrap();
        assert_eq!(out.nodes.len(), 2);
        assert_eq!(out.edges, vec![RelationEdge::new("g", MENTIONED_IN, "d#0")]);
        assert_eq!(out.nodes[1].kind, NodeKind::Chunk);
        mentions.insert("d#0".to_string(), vec!["missing".to_string()]);
        assert!(attach_chunks(&kg, &[chunk("d#0", "x")], &mentions).is_err());
    }

    #[test]
    fn id_collisions_get_suffixes() {
        let ex = ChunkExtraction {
            order: 0,
            chunk: chunk("d#0", "t"),
            result: ExtractionResult {
                nodes: vec![
                    ExtractedNode {
                        name: "Granter.ai".into(),
                        class: "Organization".into(),
                    },
                    ExtractedNode {
                        name: "Granter ai".into(),
                        class: "Organization".into(),
                    },
                ],
                ..Default::default()
            },
        };
        let kg = assemble_graph(&[ex], false).unwrap();
        let ids: Vec<_> = kg.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(
            ids,
            vec!["granter-ai-organization", "granter-ai-organization-2"]
        );
    }

    #[test]
    fn build_with_and_without_chunks() {
        let ontology = parse_turtle(
            "@prefix o: <http://example.org/onto#> . @prefix owl: <http://www.w3.org/2002/07/owl#> .
             o:Organization a owl:Class . o:Person a owl:Class . o:FOUNDED_BY a owl:ObjectProperty .",
        )
        .unwrap();
        let client = ScriptedClient::new([ScriptRule::new(
            "",
            ["Granter.ai|Organization\nAna|Person\nGranter.ai|FOUNDED_BY|Ana"],
        )]);
        let corpus = vec![Document::new("doc", "Granter.ai was founded by Ana.")];
        let cfg = ChunkingConfig::default();
        assert!(build_kg(&[], &ontology, &client, true, &cfg)
            .unwrap()
            .is_empty());
        let plain = build_kg(&corpus, &ontology, &client, false, &cfg).unwrap();
        assert!(plain.nodes.iter().all(|n| n.kind == NodeKind::Entity));
        let rich = build_kg(&corpus, &ontology, &client, true, &cfg).unwrap();
        assert_eq!(rich.nodes.len(), 3);
        assert_eq!(rich.edges.len(), 3);
        assert_eq!(rich.entity_view(), plain);
        assert_eq!(
            build_kg(&corpus, &OntologyGraph::new(), &client, false, &cfg),
            Err(KgError::EmptyConstraints)
        );
    }
}
