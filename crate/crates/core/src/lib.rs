//! Ontology-guided knowledge graph construction and subgraph retrieval.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem, the network or a clock lives in the `ontokg` companion crate;
//! this crate holds the data model and the algorithms:
//!
//! * [`graph`]: knowledge-graph nodes and edges, validation, node text.
//! * [`turtle`]: a Turtle subset parser, canonical serializer, merger and
//!   constraint extractor.
//! * [`ddl`]: a `CREATE TABLE` parser for relational schemas.
//! * [`learn`]: the per-table and per-sentence ontology learning loops.
//! * [`chunk`] and [`kg`]: corpus chunking and constrained graph extraction.
//! * [`embed`]: embedding providers, a flat vector index and cosine top-k.
//! * [`pcst`] and [`retrieve`]: prize assignment, the prize-collecting
//!   Steiner tree solver and the retrieval pipeline.
//! * [`harness`]: answer generation, labels and scoreboards.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod chunk;
pub mod ddl;
pub mod embed;
pub mod graph;
pub mod harness;
pub mod kg;
pub mod learn;
pub mod llm;
pub mod pcst;
pub mod prompts;
pub mod retrieve;
pub mod text;
pub mod turtle;

pub use chunk::{chunk_text, Chunk, ChunkingConfig};
pub use embed::{
    cosine_similarity, top_k, Embedding, EmbeddingProvider, HashedEmbedder, ScoredNode, VectorIndex,
};
pub use graph::{node_text, validate_graph, EntityNode, KnowledgeGraph, NodeKind, RelationEdge};
pub use llm::{LlmClient, LlmError, LlmRequest, ScriptedClient};
pub use pcst::{assign_prizes, solve_pcst, PrizeAssignment, Subgraph};
pub use retrieve::{retrieve, textualize, RetrievalResult, RetrieverConfig};
pub use turtle::{
    extract_constraints, merge_ontologies, parse_turtle, serialize_turtle, ConstraintSet,
    OntologyGraph,
};
