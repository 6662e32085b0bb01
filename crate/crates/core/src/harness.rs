//! Question answering over retrieved context, labeling and scoreboards.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::embed::{embed_query, top_k, EmbedError, EmbeddingProvider, VectorIndex};
use crate::graph::KnowledgeGraph;
use crate::llm::{LlmClient, LlmError, LlmRequest};
use crate::prompts;
use crate::retrieve::{retrieve, RetrieverConfig};

/// The fixed stop list used by [`auto_label`], one word per line.
pub const STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Exact abstention answer requested by the answer prompt.
pub const ABSTENTION: &str = "I don't know";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Corporate,
    Technical,
    Strategic,
    Financial,
    Scalability,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Corporate,
        Category::Technical,
        Category::Strategic,
        Category::Financial,
        Category::Scalability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Corporate => "corporate",
            Category::Technical => "technical",
            Category::Strategic => "strategic",
            Category::Financial => "financial",
            Category::Scalability => "scalability",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaItem {
    pub id: u32,
    pub category: Category,
    pub question: String,
    pub ground_truth: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Correct,
    Incomplete,
    Wrong,
    IDontKnow,
}

impl Label {
    pub const ALL: [Label; 4] = [
        Label::Correct,
        Label::Incomplete,
        Label::Wrong,
        Label::IDontKnow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Correct => "correct",
            Label::Incomplete => "incomplete",
            Label::Wrong => "wrong",
            Label::IDontKnow => "i_dont_know",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Label::Correct => "Correct",
            Label::Incomplete => "Incomplete",
            Label::Wrong => "Wrong",
            Label::IDontKnow => "I don't know",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s) || l.title().eq_ignore_ascii_case(s))
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    Manual,
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub question_id: u32,
    pub method: String,
    pub context: String,
    pub answer: String,
    pub label: Option<Label>,
    pub label_source: Option<LabelSource>,
}

impl AnswerRecord {
    /// Sets a manual label, replacing whatever was there.
    pub fn label_manually(&mut self, label: Label) {
        self.label = Some(label);
        self.label_source = Some(LabelSource::Manual);
    }

    /// Sets an auto label unless a manual one is present.
    pub fn label_automatically(&mut self, ground_truth: &str) {
        if self.label_source == Some(LabelSource::Manual) {
            return;
        }
        self.label = Some(auto_label(&self.answer, ground_truth));
        self.label_source = Some(LabelSource::Auto);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("no answer records to score")]
    NoRecords,
    #[error("record for question {question_id} of `{method}` has no label")]
    Unlabeled { question_id: u32, method: String },
    #[error("questions line {line}: {message}")]
    Questions { line: usize, message: String },
}

/// Parses `id<TAB>category<TAB>question<TAB>ground truth` lines. Blank
/// lines and lines starting with `#` are skipped.
pub fn parse_questions(text: &str) -> Result<Vec<QaItem>, HarnessError> {
    let mut out: Vec<QaItem> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| HarnessError::Questions { line, message };
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!(
                "expected 4 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let id: u32 = fields[0]
            .trim()
            .parse()
            .map_err(|_| err(format!("bad id `{}`", fields[0])))?;
        let category = Category::parse(fields[1])
            .ok_or_else(|| err(format!("unknown category `{}`", fields[1])))?;
        let (question, ground_truth) = (fields[2].trim(), fields[3].trim());
        if question.is_empty() || ground_truth.is_empty() {
            return Err(err(
                "question and ground truth must not be empty".to_string()
            ));
        }
        if out.iter().any(|q| q.id == id) {
            return Err(err(format!("duplicate id {id}")));
        }
        out.push(QaItem {
            id,
            category,
            question: question.to_string(),
            ground_truth: ground_truth.to_string(),
        });
    }
    Ok(out)
}

fn is_abstention(answer: &str) -> bool {
    let trimmed = answer.trim().trim_end_matches(['.', '!']).trim_end();
    trimmed.replace('\u{2019}', "'").to_lowercase() == "i don't know"
}

/// Lowercased tokens with punctuation deleted and stop words removed.
pub fn content_words(text: &str) -> Vec<String> {
    let stop: BTreeSet<&str> = STOPWORDS
        .lines()
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .collect();
    let cleaned: String = text
        .chars()
        .filter(|c| {
            !(c.is_ascii_punctuation()
                || matches!(c, '\u{2018}' | '\u{2019}' | '\u{201c}' | '\u{201d}'))
        })
        .flat_map(char::to_lowercase)
        .collect();
    cleaned
        .split_whitespace()
        .filter(|w| !stop.contains(w))
        .map(str::to_string)
        .collect()
}

/// Heuristic label from the recall of ground-truth content words.
///
/// `I don't know` (any case, trailing `.` or `!`) is an abstention.
/// Otherwise recall ≥ 0.8 is Correct, ≥ 0.4 Incomplete, anything lower
/// Wrong. A ground truth without content words needs an exact match.
pub fn auto_label(answer: &str, ground_truth: &str) -> Label {
    if is_abstention(answer) {
        return Label::IDontKnow;
    }
    let wanted: BTreeSet<String> = content_words(ground_truth).into_iter().collect();
    if wanted.is_empty() {
        return if answer.trim().eq_ignore_ascii_case(ground_truth.trim()) {
            Label::Correct
        } else {
            Label::Wrong
        };
    }
    let have: BTreeSet<String> = content_words(answer).into_iter().collect();
    let hit = wanted.intersection(&have).count();
    let total = wanted.len();
    if hit * 5 >= total * 4 {
        Label::Correct
    } else if hit * 5 >= total * 2 {
        Label::Incomplete
    } else {
        Label::Wrong
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub method: String,
    /// Indexed like [`Label::ALL`].
    pub counts: [usize; 4],
}

impl ScoreRow {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn count(&self, label: Label) -> usize {
        self.counts[label.slot()]
    }

    /// Percentage in tenths of a percent, rounded half up.
    pub fn tenths(&self, label: Label) -> usize {
        let total = self.total();
        if total == 0 {
            return 0;
        }
        (self.count(label) * 1000 + total / 2) / total
    }

    /// Percentage with one decimal, e.g. `90.0`.
    pub fn percent(&self, label: Label) -> String {
        let t = self.tenths(label);
        format!("{}.{}", t / 10, t % 10)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scoreboard {
    pub rows: Vec<ScoreRow>,
}

impl Scoreboard {
    pub fn row(&self, method: &str) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Counts labels per method, methods in order of first appearance.
pub fn score_answers(records: &[AnswerRecord]) -> Result<Scoreboard, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let mut board = Scoreboard::default();
    for r in records {
        let label = r.label.ok_or_else(|| HarnessError::Unlabeled {
            question_id: r.question_id,
            method: r.method.clone(),
        })?;
        let pos = match board.rows.iter().position(|row| row.method == r.method) {
            Some(p) => p,
            None => {
                board.rows.push(ScoreRow {
                    method: r.method.clone(),
                    counts: [0; 4],
                });
                board.rows.len() - 1
            }
        };
        board.rows[pos].counts[label.slot()] += 1;
    }
    Ok(board)
}

/// Renders the scoreboard as a Markdown table, one row per method.
pub fn render_scoreboard(board: &Scoreboard) -> String {
    let mut out = String::from("| Method |");
    for l in Label::ALL {
        out.push_str(&format!(" {} |", l.title()));
    }
    out.push_str(" Total |\n|---|---|---|---|---|---|\n");
    for row in &board.rows {
        out.push_str(&format!("| {} |", row.method));
        for l in Label::ALL {
            out.push_str(&format!(" {} ({}%) |", row.count(l), row.percent(l)));
        }
        out.push_str(&format!(" {} |\n", row.total()));
    }
    out
}

/// Answers `question` from `context` with one deterministic completion.
pub fn generate_answer(
    context: &str,
    question: &str,
    client: &dyn LlmClient,
) -> Result<String, LlmError> {
    let prompt = prompts::render(
        prompts::ANSWER,
        &[("context", context), ("question", question)],
    );
    let answer = client.complete(&LlmRequest::new(prompt))?;
    Ok(answer.trim().to_string())
}

/// Texts of the `k` chunks closest to `query`, best first.
pub fn vector_retrieve(
    chunk_index: &VectorIndex,
    query: &str,
    k: usize,
    provider: &dyn EmbeddingProvider,
) -> Result<Vec<String>, EmbedError> {
    if chunk_index.is_empty() {
        return Err(EmbedError::EmptyIndex);
    }
    let q = embed_query(provider, query)?;
    Ok(top_k(chunk_index, &q, k)?
        .into_iter()
        .map(|s| chunk_index.text(&s.id).unwrap_or_default().to_string())
        .collect())
}

/// Something that turns a question into a context string.
pub trait ContextSource {
    fn name(&self) -> &str;
    fn context(&self, question: &str) -> Result<String, String>;
}

/// Plain vector RAG over chunk texts.
pub struct VectorRag<'a> {
    pub name: String,
    pub index: &'a VectorIndex,
    pub provider: &'a dyn EmbeddingProvider,
    pub k: usize,
}

impl ContextSource for VectorRag<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn context(&self, question: &str) -> Result<String, String> {
        vector_retrieve(self.index, question, self.k, self.provider)
            .map(|chunks| chunks.join("\n\n"))
            .map_err(|e| e.to_string())
    }
}

/// Subgraph retrieval over a knowledge graph.
pub struct GraphRag<'a> {
    pub name: String,
    pub kg: &'a KnowledgeGraph,
    pub index: &'a VectorIndex,
    pub provider: &'a dyn EmbeddingProvider,
    pub config: RetrieverConfig,
}

impl ContextSource for GraphRag<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn context(&self, question: &str) -> Result<String, String> {
        retrieve(self.kg, self.index, question, &self.config, self.provider)
            .map(|r| r.context)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodRun {
    pub method: String,
    pub records: Vec<AnswerRecord>,
    /// Set when a stage failed; the run stops at that question.
    pub error: Option<String>,
}

/// Manual labels keyed by (method, question id).
pub type ManualLabels = BTreeMap<(String, u32), Label>;

/// Retrieves, answers and labels every question with one method. Manual
/// labels win; the rest are auto-labeled.
pub fn evaluate_method(
    source: &dyn ContextSource,
    questions: &[QaItem],
    client: &dyn LlmClient,
    manual: &ManualLabels,
) -> MethodRun {
    let method = source.name().to_string();
    let mut records = Vec::new();
    for q in questions {
        let step = source.context(&q.question).and_then(|context| {
            generate_answer(&context, &q.question, client)
                .map(|answer| (context, answer))
                .map_err(|e| e.to_string())
        });
        let (context, answer) = match step {
            Ok(v) => v,
            Err(e) => {
                return MethodRun {
                    method,
                    records,
                    error: Some(format!("question {}: {e}", q.id)),
                };
            }
        };
        let mut record = AnswerRecord {
            question_id: q.id,
            method: method.clone(),
            context,
            answer,
            label: None,
            label_source: None,
        };
        match manual.get(&(method.clone(), q.id)) {
            Some(&l) => record.label_manually(l),
            None => record.label_automatically(&q.ground_truth),
        }
        records.push(record);
    }
    MethodRun {
        method,
        records,
        error: None,
    }
}

/// Per-method answer file: one block per question, in question-id order.
pub fn render_transcript(run: &MethodRun, questions: &[QaItem]) -> String {
    let by_id: BTreeMap<u32, &QaItem> = questions.iter().map(|q| (q.id, q)).collect();
    let mut records: Vec<&AnswerRecord> = run.records.iter().collect();
    records.sort_by_key(|r| r.question_id);
    let mut out = format!("Method: {}\n\n", run.method);
    for r in records {
        let question = by_id
            .get(&r.question_id)
            .map_or("", |q| q.question.as_str());
        out.push_str(&format!("Question {}: {}\n", r.question_id, question));
        if let Some(q) = by_id.get(&r.question_id) {
            out.push_str(&format!("Ground truth: {}\n", q.ground_truth));
        }
        out.push_str(&format!("Answer: {}\n", r.answer));
        let label = r.label.map_or("unlabeled", Label::title);
        let source = match r.label_source {
            Some(LabelSource::Manual) => " (manual)",
            Some(LabelSource::Auto) => " (auto)",
            None => "",
        };
        out.push_str(&format!("Label: {label}{source}\n\n"));
    }
    if let Some(e) = &run.error {
        out.push_str(&format!("Aborted: {e}\n"));
    }
    out
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}
