//! Experiment runner: every configured method answers every question, then
//! the answers are labeled and tallied.
//!
//! ```toml
//! questions = "questions.tsv"
//! labels = "labels.tsv"     # optional manual labels: method \t id \t label
//! output_dir = "out"
//! mock = "mock.toml"        # optional; `--mock` on the command line wins
//! batch_size = 64           # optional, embedding batch size
//!
//! [retriever]               # optional, applies to graph methods
//! k = 8
//! edge_cost = 1.0
//! size_cap = 24
//!
//! [[method]]
//! name = "Vector RAG"
//! kind = "vector-rag"
//! corpus = "corpus"
//! chunk_size = 500
//! overlap = 50
//! k = 4
//!
//! [[method]]
//! name = "Ontology KG with chunks"
//! kind = "graph-rag-over-kg"
//! graph = "kg-chunks"       # directory holding nodes.csv and edges.csv
//! ```
//!
//! Relative paths are resolved against the directory of the config file.
//!
//! Outputs in `output_dir`: `transcript-<method slug>.txt` per method,
//! `records.jsonl` with every answer record, and `scoreboard.md`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ontokg_core::chunk::{chunk_text, ChunkingConfig};
use ontokg_core::embed::{build_index, index_texts, EmbeddingProvider, VectorIndex};
use ontokg_core::harness::{
    evaluate_method, parse_questions, render_scoreboard, render_transcript, score_answers,
    AnswerRecord, ContextSource, GraphRag, HarnessError, Label, ManualLabels, MethodRun, QaItem,
    Scoreboard, VectorRag,
};
use ontokg_core::llm::LlmClient;
use ontokg_core::retrieve::RetrieverConfig;
use ontokg_core::text::slugify;
use serde::Deserialize;

use crate::backend;
use crate::corpus::load_corpus;
use crate::csv_io::load_graph_dir;
use crate::index_cache::load_index;

const DEFAULT_BATCH: usize = 64;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub questions: PathBuf,
    pub labels: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub mock: Option<PathBuf>,
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub retriever: RetrieverSection,
    #[serde(rename = "method")]
    pub methods: Vec<MethodConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrieverSection {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_edge_cost")]
    pub edge_cost: f64,
    pub size_cap: Option<usize>,
}

fn default_k() -> usize {
    RetrieverConfig::default().k
}

fn default_edge_cost() -> f64 {
    RetrieverConfig::default().edge_cost
}

impl Default for RetrieverSection {
    fn default() -> Self {
        RetrieverSection {
            k: default_k(),
            edge_cost: default_edge_cost(),
            size_cap: None,
        }
    }
}

impl From<&RetrieverSection> for RetrieverConfig {
    fn from(s: &RetrieverSection) -> Self {
        RetrieverConfig {
            k: s.k,
            edge_cost: s.edge_cost,
            size_cap: s.size_cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodConfig {
    VectorRag {
        name: String,
        corpus: PathBuf,
        #[serde(default = "default_chunk_size")]
        chunk_size: usize,
        #[serde(default = "default_overlap")]
        overlap: usize,
        #[serde(default = "default_vector_k")]
        k: usize,
    },
    GraphRagOverKg {
        name: String,
        graph: PathBuf,
        /// Index cache; built in memory when absent.
        index: Option<PathBuf>,
    },
}

fn default_chunk_size() -> usize {
    ChunkingConfig::default().chunk_size()
}

fn default_overlap() -> usize {
    ChunkingConfig::default().overlap()
}

fn default_vector_k() -> usize {
    4
}

impl MethodConfig {
    pub fn name(&self) -> &str {
        match self {
            MethodConfig::VectorRag { name, .. } | MethodConfig::GraphRagOverKg { name, .. } => {
                name
            }
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        if config.methods.is_empty() {
            bail!("experiment config names no methods");
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &config.methods {
            if !seen.insert(m.name()) {
                bail!("method name `{}` is used twice", m.name());
            }
        }
        RetrieverConfig::from(&config.retriever).validate()?;
        Ok(config)
    }

    /// Reads the file and makes every path in it absolute relative to it.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config =
            Self::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut config.questions);
        fix(&mut config.output_dir);
        config.labels.as_mut().map(fix);
        config.mock.as_mut().map(fix);
        for m in &mut config.methods {
            match m {
                MethodConfig::VectorRag { corpus, .. } => fix(corpus),
                MethodConfig::GraphRagOverKg { graph, index, .. } => {
                    fix(graph);
                    index.as_mut().map(fix);
                }
            }
        }
        Ok(config)
    }
}

/// Manual labels, one `method \t id \t label` line each. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_labels(text: &str) -> Result<ManualLabels> {
    let mut labels = ManualLabels::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [method, id, label] = fields[..] else {
            bail!("labels line {}: expected 3 tab-separated fields", i + 1);
        };
        let id: u32 = id
            .trim()
            .parse()
            .with_context(|| format!("labels line {}: bad question id", i + 1))?;
        let label = Label::parse(label.trim())
            .with_context(|| format!("labels line {}: unknown label `{label}`", i + 1))?;
        labels.insert((method.trim().to_string(), id), label);
    }
    Ok(labels)
}

pub fn transcript_file_name(method: &str) -> String {
    let slug = slugify(method);
    format!(
        "transcript-{}.txt",
        if slug.is_empty() { "method" } else { &slug }
    )
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub runs: Vec<MethodRun>,
    pub scoreboard: Scoreboard,
    pub scoreboard_text: String,
}

fn chunk_index(
    corpus: &Path,
    chunking: &ChunkingConfig,
    provider: &dyn EmbeddingProvider,
    batch: usize,
) -> Result<VectorIndex> {
    let docs =
        load_corpus(corpus).with_context(|| format!("reading corpus {}", corpus.display()))?;
    let items: Vec<(String, String)> = docs
        .iter()
        .flat_map(|d| chunk_text(&d.id, &d.text, chunking))
        .map(|c| (c.id, c.text))
        .collect();
    Ok(index_texts(&items, provider, batch)?)
}

fn run_method(
    method: &MethodConfig,
    config: &ExperimentConfig,
    questions: &[QaItem],
    client: &dyn LlmClient,
    provider: &dyn EmbeddingProvider,
    tag: &str,
    manual: &ManualLabels,
) -> MethodRun {
    let batch = config.batch_size.unwrap_or(DEFAULT_BATCH);
    let setup = || -> Result<MethodRun> {
        Ok(match method {
            MethodConfig::VectorRag {
                name,
                corpus,
                chunk_size,
                overlap,
                k,
            } => {
                let chunking = ChunkingConfig::new(*chunk_size, *overlap)?;
                let index = chunk_index(corpus, &chunking, provider, batch)?;
                let source = VectorRag {
                    name: name.clone(),
                    index: &index,
                    provider,
                    k: *k,
                };
                evaluate_method(&source as &dyn ContextSource, questions, client, manual)
            }
            MethodConfig::GraphRagOverKg { name, graph, index } => {
                let kg = load_graph_dir(graph)?;
                let index = match index {
                    Some(path) => {
                        let (index, found) = load_index(path)?;
                        if found != tag {
                            bail!(
                                "index {} was built by `{found}`, not `{tag}`",
                                path.display()
                            );
                        }
                        index
                    }
                    None => build_index(&kg, provider, batch)?,
                };
                let source = GraphRag {
                    name: name.clone(),
                    kg: &kg,
                    index: &index,
                    provider,
                    config: RetrieverConfig::from(&config.retriever),
                };
                evaluate_method(&source, questions, client, manual)
            }
        })
    };
    setup().unwrap_or_else(|e| MethodRun {
        method: method.name().to_string(),
        records: Vec::new(),
        error: Some(format!("setup: {e:#}")),
    })
}

/// Runs every method in config order and writes the outputs.
pub fn run_experiment(
    config: &ExperimentConfig,
    mock_override: Option<&Path>,
) -> Result<ExperimentOutput> {
    let questions_text = fs::read_to_string(&config.questions)
        .with_context(|| format!("reading {}", config.questions.display()))?;
    let questions = parse_questions(&questions_text)?;
    let manual = match &config.labels {
        Some(path) => parse_labels(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => ManualLabels::new(),
    };
    let mock = mock_override.or(config.mock.as_deref());
    let client = backend::llm_client(mock)?;
    let (provider, tag) = backend::embedder(mock.is_some())?;

    let mut runs = Vec::new();
    for method in &config.methods {
        runs.push(run_method(
            method,
            config,
            &questions,
            client.as_ref(),
            provider.as_ref(),
            &tag,
            &manual,
        ));
    }

    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    let mut jsonl = String::new();
    for run in &runs {
        fs::write(
            config.output_dir.join(transcript_file_name(&run.method)),
            render_transcript(run, &questions),
        )?;
        for r in &run.records {
            jsonl.push_str(&serde_json::to_string(r)?);
            jsonl.push('\n');
        }
    }
    fs::write(config.output_dir.join("records.jsonl"), jsonl)?;

    let records: Vec<AnswerRecord> = runs
        .iter()
        .flat_map(|r| r.records.iter().cloned())
        .collect();
    let scoreboard = match score_answers(&records) {
        Ok(board) => board,
        Err(HarnessError::NoRecords) => Scoreboard { rows: Vec::new() },
        Err(e) => return Err(e.into()),
    };
    let mut scoreboard_text = render_scoreboard(&scoreboard);
    let failed: Vec<&MethodRun> = runs.iter().filter(|r| r.error.is_some()).collect();
    if !failed.is_empty() {
        scoreboard_text.push('\n');
        for run in failed {
            scoreboard_text.push_str(&format!(
                "{} aborted after {} of {} questions: {}\n",
                run.method,
                run.records.len(),
                questions.len(),
                run.error.as_deref().unwrap_or_default()
            ));
        }
    }
    if records
        .iter()
        .any(|r| r.label_source == Some(ontokg_core::harness::LabelSource::Auto))
    {
        scoreboard_text.push_str("\nLabels marked (auto) in the transcripts come from string matching, not human review.\n");
    }
    fs::write(config.output_dir.join("scoreboard.md"), &scoreboard_text)?;
    Ok(ExperimentOutput {
        runs,
        scoreboard,
        scoreboard_text,
    })
}

/// Applies manual labels to stored records and auto-labels the rest where a
/// ground truth is known.
pub fn relabel(records: &mut [AnswerRecord], manual: &ManualLabels, questions: &[QaItem]) {
    let truth: BTreeMap<u32, &str> = questions
        .iter()
        .map(|q| (q.id, q.ground_truth.as_str()))
        .collect();
    for r in records {
        if let Some(&label) = manual.get(&(r.method.clone(), r.question_id)) {
            r.label_manually(label);
        } else if r.label.is_none() {
            if let Some(gt) = truth.get(&r.question_id) {
                r.label_automatically(gt);
            }
        }
    }
}
