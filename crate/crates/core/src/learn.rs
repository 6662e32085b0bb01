//! Ontology learning.
//!
//! Two loops share one parse-and-repair step:
//!
//! * [`rigor_learn`] walks a relational schema one table at a time. Each
//!   prompt carries the table's DDL, the best-matching fragments of a
//!   reference ontology and the ontology built so far; the answer is a delta
//!   ontology that is merged into the running result.
//! * [`text_learn`] asks for a delta per sentence. Deltas do not depend on
//!   each other, and sentences whose delta cannot be repaired are skipped.
//!
//! Every processed unit leaves one [`TraceRecord`].

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::ddl::TableDdl;
use crate::llm::{LlmClient, LlmError, LlmRequest};
use crate::prompts;
use crate::text::{stem, word_tokens};
use crate::turtle::{
    local_name, merge_ontologies, parse_turtle, serialize_turtle, vocab, OntologyGraph, Term,
    Triple, TurtleError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    /// Namespace the prompts ask new terms to live in.
    pub namespace: String,
    pub prefix: String,
    /// Reference fragments per table prompt.
    pub reference_k: usize,
    pub max_repairs: usize,
    /// Current-ontology context is cut to this many of the newest triples.
    pub context_triples: usize,
    pub max_tokens: u32,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            namespace: "http://example.org/onto#".to_string(),
            prefix: "onto".to_string(),
            reference_k: 3,
            max_repairs: 2,
            context_triples: 200,
            max_tokens: LlmRequest::DEFAULT_MAX_TOKENS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairAttempt {
    pub prompt: String,
    pub response: String,
    /// Parse error of `response`, if it still did not parse.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UnitOutcome {
    Parsed,
    Repaired,
    Skipped { reason: String },
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Table name or `sentence <n>`.
    pub unit: String,
    pub prompt: String,
    pub response: String,
    pub parse_error: Option<String>,
    pub repairs: Vec<RepairAttempt>,
    pub outcome: UnitOutcome,
    pub delta_triples: usize,
    /// The parsed delta, kept so the final ontology can be checked against the trace.
    #[serde(default)]
    pub delta: Option<OntologyGraph>,
}

/// Append-only log of a learning run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearningTrace {
    records: Vec<TraceRecord>,
}

impl LearningTrace {
    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// One generation call per record.
    pub fn generation_calls(&self) -> usize {
        self.records.len()
    }

    pub fn repair_calls(&self) -> usize {
        self.records.iter().map(|r| r.repairs.len()).sum()
    }

    /// Union of every delta that parsed.
    pub fn union_of_deltas(&self) -> OntologyGraph {
        self.records
            .iter()
            .filter_map(|r| r.delta.as_ref())
            .fold(OntologyGraph::new(), |acc, d| merge_ontologies(&acc, d))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("schema has no tables")]
    EmptySchema,
    #[error("{unit}: Turtle still invalid after {attempts} repair attempts: {last_error}")]
    RepairExhausted {
        unit: String,
        attempts: usize,
        last_error: TurtleError,
    },
    #[error("{unit}: {source}")]
    Client { unit: String, source: LlmError },
}

/// A failed run keeps everything produced before the failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct LearnFailure {
    pub error: LearnError,
    pub trace: LearningTrace,
    pub partial: OntologyGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Repaired {
    pub graph: OntologyGraph,
    pub attempts: Vec<RepairAttempt>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RepairError {
    #[error("Turtle still invalid after {} repair attempts: {last_error}", attempts.len())]
    Exhausted {
        attempts: Vec<RepairAttempt>,
        last_error: TurtleError,
    },
    #[error("client failed during repair: {source}")]
    Client {
        source: LlmError,
        attempts: Vec<RepairAttempt>,
    },
}

/// Takes the body of the first fenced code block if there is one.
pub fn strip_code_fence(response: &str) -> &str {
    let Some(open) = response.find("```") else {
        return response.trim();
    };
    let after = &response[open + 3..];
    let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
    let body = &after[body_start..];
    match body.find("```") {
        Some(close) => body[..close].trim(),
        None => body.trim(),
    }
}

/// Asks the client to fix `bad_text` until it parses, at most `max_attempts` times.
pub fn repair_turtle(
    bad_text: &str,
    error: &TurtleError,
    client: &dyn LlmClient,
    max_attempts: usize,
) -> Result<Repaired, RepairError> {
    let mut attempts = Vec::new();
    let mut document = String::from(bad_text);
    let mut last_error = error.clone();
    for _ in 0..max_attempts {
        let line = last_error.line.to_string();
        let column = last_error.column.to_string();
        let prompt = prompts::render(
            prompts::TURTLE_REPAIR,
            &[
                ("line", &line),
                ("column", &column),
                ("message", &last_error.message),
                ("document", &document),
            ],
        );
        let response = match client.complete(&LlmRequest::new(prompt.clone())) {
            Ok(r) => r,
            Err(source) => return Err(RepairError::Client { source, attempts }),
        };
        match parse_turtle(strip_code_fence(&response)) {
            Ok(graph) => {
                attempts.push(RepairAttempt {
                    prompt,
                    response,
                    error: None,
                });
                return Ok(Repaired { graph, attempts });
            }
            Err(e) => {
                attempts.push(RepairAttempt {
                    prompt,
                    response: response.clone(),
                    error: Some(e.to_string()),
                });
                document = String::from(strip_code_fence(&response));
                last_error = e;
            }
        }
    }
    Err(RepairError::Exhausted {
        attempts,
        last_error,
    })
}

fn stemmed_tokens(s: &str, into: &mut BTreeSet<String>) {
    for t in word_tokens(s) {
        into.insert(stem(&t).to_string());
    }
}

/// Reference-ontology subjects most related to `table`, as Turtle fragments.
///
/// Each subject's triples form a group. A group's score is the number of
/// distinct stemmed word tokens shared between the subject's local name and
/// `rdfs:label`s on one side and the table and column names on the other.
/// Ties go to the smaller subject IRI.
pub fn retrieve_reference_fragments(
    table: &TableDdl,
    reference: &OntologyGraph,
    k: usize,
) -> Vec<String> {
    let mut table_tokens = BTreeSet::new();
    stemmed_tokens(&table.name, &mut table_tokens);
    for c in &table.columns {
        stemmed_tokens(&c.name, &mut table_tokens);
    }
    let mut scored: Vec<(usize, &str, Vec<&Triple>)> = reference
        .subject_groups()
        .into_iter()
        .map(|(subject, triples)| {
            let mut tokens = BTreeSet::new();
            stemmed_tokens(local_name(subject), &mut tokens);
            for t in &triples {
                if let (true, Term::Literal(l)) = (t.predicate == vocab::RDFS_LABEL, &t.object) {
                    stemmed_tokens(&l.value, &mut tokens);
                }
            }
            (tokens.intersection(&table_tokens).count(), subject, triples)
        })
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored
        .into_iter()
        .take(k)
        .map(|(_, _, triples)| {
            let mut fragment = OntologyGraph {
                prefixes: reference.prefixes.clone(),
                triples: triples.into_iter().cloned().collect(),
            };
            fragment.retain_used_prefixes();
            serialize_turtle(&fragment)
        })
        .collect()
}

/// Parses a generation response, repairing it if needed, and records the unit.
fn process_unit(
    unit: String,
    prompt: String,
    client: &dyn LlmClient,
    max_repairs: usize,
) -> Result<(TraceRecord, Option<OntologyGraph>, Option<TurtleError>), LearnError> {
    let response = client
        .complete(&LlmRequest::new(prompt.clone()))
        .map_err(|source| LearnError::Client {
            unit: unit.clone(),
            source,
        })?;
    let mut record = TraceRecord {
        unit: unit.clone(),
        prompt,
        response: response.clone(),
        parse_error: None,
        repairs: Vec::new(),
        outcome: UnitOutcome::Parsed,
        delta_triples: 0,
        delta: None,
    };
    let body = strip_code_fence(&response);
    let delta = match parse_turtle(body) {
        Ok(g) => g,
        Err(e) => {
            record.parse_error = Some(e.to_string());
            match repair_turtle(body, &e, client, max_repairs) {
                Ok(Repaired { graph, attempts }) => {
                    record.repairs = attempts;
                    record.outcome = UnitOutcome::Repaired;
                    graph
                }
                Err(RepairError::Exhausted {
                    attempts,
                    last_error,
                }) => {
                    record.repairs = attempts;
                    record.outcome = UnitOutcome::Failed {
                        reason: last_error.to_string(),
                    };
                    return Ok((record, None, Some(last_error)));
                }
                Err(RepairError::Client { source, .. }) => {
                    return Err(LearnError::Client { unit, source });
                }
            }
        }
    };
    record.delta_triples = delta.len();
    record.delta = Some(delta.clone());
    Ok((record, Some(delta), None))
}

/// Turtle for the newest `limit` triples of the running ontology.
fn context_ontology(current: &OntologyGraph, insertion_order: &[Triple], limit: usize) -> String {
    if current.is_empty() {
        return "(empty)".to_string();
    }
    if current.len() <= limit {
        return serialize_turtle(current);
    }
    let mut recent = OntologyGraph {
        prefixes: current.prefixes.clone(),
        triples: insertion_order.iter().rev().take(limit).cloned().collect(),
    };
    recent.retain_used_prefixes();
    serialize_turtle(&recent)
}

fn table_prompt(
    table: &TableDdl,
    reference: &OntologyGraph,
    current: &OntologyGraph,
    insertion_order: &[Triple],
    config: &LearnConfig,
) -> String {
    let fragments = retrieve_reference_fragments(table, reference, config.reference_k);
    let fragments = if fragments.is_empty() {
        "(none)".to_string()
    } else {
        fragments.join("\n")
    };
    let ontology = context_ontology(current, insertion_order, config.context_triples);
    prompts::render(
        prompts::RIGOR_TABLE,
        &[
            ("ddl", &table.to_sql()),
            ("fragments", fragments.trim_end()),
            ("ontology", ontology.trim_end()),
            ("namespace", &config.namespace),
            ("prefix", &config.prefix),
        ],
    )
}

/// Builds an ontology from a relational schema, one table at a time.
#[allow(clippy::result_large_err)]
pub fn rigor_learn(
    schema: &[TableDdl],
    reference: &OntologyGraph,
    client: &dyn LlmClient,
    config: &LearnConfig,
) -> Result<(OntologyGraph, LearningTrace), LearnFailure> {
    let mut trace = LearningTrace::default();
    let mut current = OntologyGraph::new();
    if schema.is_empty() {
        return Err(LearnFailure {
            error: LearnError::EmptySchema,
            trace,
            partial: current,
        });
    }
    let mut insertion_order: Vec<Triple> = Vec::new();
    for table in schema {
        let prompt = table_prompt(table, reference, &current, &insertion_order, config);
        let (record, delta, failure) =
            match process_unit(table.name.clone(), prompt, client, config.max_repairs) {
                Ok(r) => r,
                Err(error) => {
                    return Err(LearnFailure {
                        error,
                        trace,
                        partial: current,
                    })
                }
            };
        trace.push(record);
        if let Some(last_error) = failure {
            let attempts = trace.records().last().map_or(0, |r| r.repairs.len());
            return Err(LearnFailure {
                error: LearnError::RepairExhausted {
                    unit: table.name.clone(),
                    attempts,
                    last_error,
                },
                trace,
                partial: current,
            });
        }
        if let Some(delta) = delta {
            insertion_order.extend(
                delta
                    .triples
                    .iter()
                    .filter(|t| !current.triples.contains(*t))
                    .cloned(),
            );
            current = merge_ontologies(&current, &delta);
        }
    }
    Ok((current, trace))
}

/// Builds an ontology sentence by sentence. Sentences whose Turtle cannot be
/// repaired are recorded as skipped.
#[allow(clippy::result_large_err)]
pub fn text_learn(
    sentences: &[String],
    client: &dyn LlmClient,
    config: &LearnConfig,
) -> Result<(OntologyGraph, LearningTrace), LearnFailure> {
    let mut trace = LearningTrace::default();
    let mut current = OntologyGraph::new();
    for (i, sentence) in sentences.iter().enumerate() {
        let prompt = prompts::render(
            prompts::TEXT_SENTENCE,
            &[
                ("sentence", sentence),
                ("namespace", &config.namespace),
                ("prefix", &config.prefix),
            ],
        );
        let unit = format!("sentence {}", i + 1);
        let (mut record, delta, _) = match process_unit(unit, prompt, client, config.max_repairs) {
            Ok(r) => r,
            Err(error) => {
                return Err(LearnFailure {
                    error,
                    trace,
                    partial: current,
                })
            }
        };
        if let UnitOutcome::Failed { reason } = &record.outcome {
            record.outcome = UnitOutcome::Skipped {
                reason: reason.clone(),
            };
        }
        trace.push(record);
        if let Some(delta) = delta {
            current = merge_ontologies(&current, &delta);
        }
    }
    Ok((current, trace))
}
