use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ontokg::backend::{self, InstantClock};
use ontokg::core::chunk::ChunkingConfig;
use ontokg::core::ddl::parse_ddl;
use ontokg::core::embed::{build_index, EmbeddingProvider, VectorIndex};
use ontokg::core::harness::{
    generate_answer, parse_questions, render_scoreboard, score_answers, AnswerRecord,
};
use ontokg::core::kg::build_kg;
use ontokg::core::learn::{rigor_learn, text_learn, LearnConfig, LearningTrace};
use ontokg::core::retrieve::{retrieve_timed, RetrieverConfig, StageTimings};
use ontokg::core::text::split_sentences;
use ontokg::core::turtle::{parse_turtle, serialize_turtle, OntologyGraph};
use ontokg::corpus::load_corpus;
use ontokg::csv_io::{load_graph_dir, save_graph};
use ontokg::experiment::{parse_labels, relabel, run_experiment, ExperimentConfig};
use ontokg::index_cache::{load_index, save_index};
use ontokg::trace::write_trace;

/// Ontology-guided knowledge graphs and subgraph retrieval.
#[derive(Parser)]
#[command(name = "ontokg", version)]
struct Cli {
    /// Scripted LLM responses (TOML). Also swaps the embedding endpoint for
    /// the built-in hashed embedder, so no network is used.
    #[arg(long, global = true, value_name = "FILE")]
    mock: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn an ontology from SQL DDL, one table at a time.
    LearnRdb {
        #[arg(long)]
        schema: PathBuf,
        /// Reference ontology in Turtle.
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// JSON-lines trace of every prompt, response and repair.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        learn: LearnArgs,
    },
    /// Learn an ontology from plain text, one sentence at a time.
    LearnText {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        learn: LearnArgs,
    },
    /// Extract a knowledge graph from a directory of .txt files.
    BuildKg {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        ontology: PathBuf,
        /// Output directory for nodes.csv and edges.csv.
        #[arg(long)]
        out: PathBuf,
        /// Add chunk nodes and MENTIONED_IN edges.
        #[arg(long)]
        with_chunks: bool,
        #[arg(long, default_value_t = ChunkingConfig::default().chunk_size())]
        chunk_size: usize,
        #[arg(long, default_value_t = ChunkingConfig::default().overlap())]
        overlap: usize,
    },
    /// Embed every node of a graph into an index cache file.
    Index {
        #[arg(long)]
        graph: PathBuf,
        /// Defaults to <graph>/index.bin.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        batch_size: usize,
    },
    /// Print the textualized subgraph for a query; stage timings go to stderr.
    Retrieve {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        query: String,
    },
    /// Retrieve context for a question and answer it.
    Answer {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        question: String,
        /// Print the retrieved context before the answer.
        #[arg(long)]
        show_context: bool,
    },
    /// Run an experiment config and write transcripts and a scoreboard.
    Eval {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tally stored answer records.
    Score {
        /// records.jsonl written by `eval`.
        #[arg(long)]
        records: PathBuf,
        /// Manual labels, `method \t id \t label` per line; these win.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Questions file, used to auto-label records that have no label.
        #[arg(long)]
        questions: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long, default_value_t = LearnConfig::default().namespace)]
    namespace: String,
    #[arg(long, default_value_t = LearnConfig::default().prefix)]
    prefix: String,
    #[arg(long, default_value_t = LearnConfig::default().max_repairs)]
    max_repairs: usize,
}

impl LearnArgs {
    fn config(&self) -> LearnConfig {
        LearnConfig {
            namespace: self.namespace.clone(),
            prefix: self.prefix.clone(),
            max_repairs: self.max_repairs,
            ..LearnConfig::default()
        }
    }
}

#[derive(Args)]
struct GraphArgs {
    /// Directory holding nodes.csv and edges.csv.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = RetrieverConfig::default().k)]
    k: usize,
    #[arg(long, default_value_t = RetrieverConfig::default().edge_cost)]
    edge_cost: f64,
    /// Keep at most this many nodes of the tree.
    #[arg(long)]
    size_cap: Option<usize>,
    /// Index cache written by `index`; built in memory when omitted.
    #[arg(long)]
    index: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn finish_learning(
    outcome: Result<(OntologyGraph, LearningTrace), ontokg::core::learn::LearnFailure>,
    out: &Path,
    trace_path: Option<&Path>,
) -> Result<()> {
    let (graph, trace, error) = match outcome {
        Ok((g, t)) => (g, t, None),
        Err(f) => (f.partial, f.trace, Some(f.error)),
    };
    if let Some(path) = trace_path {
        write_trace(&trace, path).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(error) = error {
        let partial = out.with_extension("partial.ttl");
        write(&partial, serialize_turtle(&graph))?;
        bail!(
            "{error} (partial ontology written to {})",
            partial.display()
        );
    }
    write(out, serialize_turtle(&graph))?;
    eprintln!(
        "{} triples, generation calls: {}, repair calls: {}",
        graph.len(),
        trace.generation_calls(),
        trace.repair_calls()
    );
    Ok(())
}

fn graph_index(
    args: &GraphArgs,
    kg: &ontokg::core::graph::KnowledgeGraph,
    mock: bool,
) -> Result<(Box<dyn EmbeddingProvider>, VectorIndex)> {
    let (provider, tag) = backend::embedder(mock)?;
    let index = match &args.index {
        Some(path) => {
            let (index, found) =
                load_index(path).with_context(|| format!("reading {}", path.display()))?;
            if found != tag {
                bail!(
                    "index {} was built by `{found}`, not `{tag}`",
                    path.display()
                );
            }
            index
        }
        None => build_index(kg, provider.as_ref(), 64)?,
    };
    Ok((provider, index))
}

fn print_timings(t: &StageTimings) {
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1000.0;
    eprintln!(
        "embed {:.3} ms, top-k {:.3} ms, prizes {:.3} ms, pcst {:.3} ms, textualize {:.3} ms",
        ms(t.embed),
        ms(t.top_k),
        ms(t.prizes),
        ms(t.pcst),
        ms(t.textualize)
    );
}

fn run(cli: Cli) -> Result<()> {
    let mock = cli.mock.as_deref();
    match cli.command {
        Command::LearnRdb {
            schema,
            reference,
            out,
            trace,
            learn,
        } => {
            let schema = parse_ddl(&read(&schema)?)
                .with_context(|| format!("parsing {}", schema.display()))?;
            for w in &schema.warnings {
                eprintln!("warning: line {}: {}", w.line, w.message);
            }
            let reference = parse_turtle(&read(&reference)?)
                .with_context(|| format!("parsing {}", reference.display()))?;
            let client = backend::llm_client(mock)?;
            finish_learning(
                rigor_learn(&schema.tables, &reference, client.as_ref(), &learn.config()),
                &out,
                trace.as_deref(),
            )
        }
        Command::LearnText {
            input,
            out,
            trace,
            learn,
        } => {
            let sentences = split_sentences(&read(&input)?);
            let client = backend::llm_client(mock)?;
            finish_learning(
                text_learn(&sentences, client.as_ref(), &learn.config()),
                &out,
                trace.as_deref(),
            )
        }
        Command::BuildKg {
            corpus,
            ontology,
            out,
            with_chunks,
            chunk_size,
            overlap,
        } => {
            let docs =
                load_corpus(&corpus).with_context(|| format!("reading {}", corpus.display()))?;
            let ontology = parse_turtle(&read(&ontology)?)
                .with_context(|| format!("parsing {}", ontology.display()))?;
            let chunking = ChunkingConfig::new(chunk_size, overlap)?;
            let client = backend::llm_client(mock)?;
            let kg = build_kg(&docs, &ontology, client.as_ref(), with_chunks, &chunking)?;
            save_graph(&kg, &out)?;
            eprintln!("{} nodes, {} edges", kg.nodes.len(), kg.edges.len());
            Ok(())
        }
        Command::Index {
            graph,
            out,
            batch_size,
        } => {
            let kg = load_graph_dir(&graph)?;
            let (provider, tag) = backend::embedder(mock.is_some())?;
            let index = build_index(&kg, provider.as_ref(), batch_size)?;
            let out = out.unwrap_or_else(|| graph.join("index.bin"));
            save_index(&index, &tag, &out).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("{} vectors of dimension {}", index.len(), index.dim());
            Ok(())
        }
        Command::Retrieve { graph, query } => {
            let kg = load_graph_dir(&graph.graph)?;
            let (provider, index) = graph_index(&graph, &kg, mock.is_some())?;
            let config = RetrieverConfig {
                k: graph.k,
                edge_cost: graph.edge_cost,
                size_cap: graph.size_cap,
            };
            let result = retrieve_timed(
                &kg,
                &index,
                &query,
                &config,
                provider.as_ref(),
                &InstantClock::default(),
            )?;
            print!("{}", result.context);
            print_timings(&result.timings);
            Ok(())
        }
        Command::Answer {
            graph,
            question,
            show_context,
        } => {
            let kg = load_graph_dir(&graph.graph)?;
            let (provider, index) = graph_index(&graph, &kg, mock.is_some())?;
            let config = RetrieverConfig {
                k: graph.k,
                edge_cost: graph.edge_cost,
                size_cap: graph.size_cap,
            };
            let result = retrieve_timed(
                &kg,
                &index,
                &question,
                &config,
                provider.as_ref(),
                &InstantClock::default(),
            )?;
            let client = backend::llm_client(mock)?;
            let answer = generate_answer(&result.context, &question, client.as_ref())?;
            if show_context {
                println!("{}", result.context);
            }
            println!("{answer}");
            Ok(())
        }
        Command::Eval { config } => {
            let config = ExperimentConfig::load(&config)?;
            let output = run_experiment(&config, mock)?;
            print!("{}", output.scoreboard_text);
            if output.runs.iter().any(|r| r.error.is_some()) {
                bail!(
                    "one or more methods aborted; see the transcripts in {}",
                    config.output_dir.display()
                );
            }
            Ok(())
        }
        Command::Score {
            records,
            labels,
            questions,
        } => {
            let mut parsed = Vec::new();
            for (i, line) in read(&records)?.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let record: AnswerRecord = serde_json::from_str(line)
                    .with_context(|| format!("{} line {}", records.display(), i + 1))?;
                parsed.push(record);
            }
            let manual = match labels {
                Some(path) => parse_labels(&read(&path)?)?,
                None => Default::default(),
            };
            let questions = match questions {
                Some(path) => parse_questions(&read(&path)?)?,
                None => Vec::new(),
            };
            relabel(&mut parsed, &manual, &questions);
            print!("{}", render_scoreboard(&score_answers(&parsed)?));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
