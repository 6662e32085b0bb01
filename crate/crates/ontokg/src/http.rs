//! HTTP clients for a chat-completion endpoint and an embeddings endpoint.
//!
//! Chat request body:
//!
//! ```json
//! {"model": "...", "temperature": 0.0, "max_tokens": 2048,
//!  "messages": [{"role": "user", "content": "<prompt>"}]}
//! ```
//!
//! The answer is read from `choices[0].message.content`.
//!
//! Embedding request body is `{"model": "...", "input": ["text", ...]}`; vectors
//! are read from `data[i].embedding`, ordered by `data[i].index` when present.
//!
//! Both endpoints take an optional bearer token.

use std::time::Duration;

use ontokg_core::embed::{Embedding, EmbeddingProvider, ProviderError};
use ontokg_core::llm::{LlmClient, LlmError, LlmRequest};
use serde::Deserialize;
use serde_json::json;

pub const LLM_ENDPOINT: &str = "LLM_ENDPOINT";
pub const LLM_MODEL: &str = "LLM_MODEL";
pub const LLM_API_KEY: &str = "LLM_API_KEY";
pub const EMBED_ENDPOINT: &str = "EMBED_ENDPOINT";
pub const EMBED_MODEL: &str = "EMBED_MODEL";
pub const EMBED_API_KEY: &str = "EMBED_API_KEY";

fn agent(timeout: Duration) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .build()
        .into()
}

fn env(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.trim().is_empty())
}

fn post(
    agent: &ureq::Agent,
    url: &str,
    key: Option<&str>,
    body: &serde_json::Value,
) -> Result<serde_json::Value, String> {
    let mut req = agent.post(url);
    if let Some(key) = key {
        req = req.header("Authorization", &format!("Bearer {key}"));
    }
    let mut resp = req.send_json(body).map_err(|e| e.to_string())?;
    resp.body_mut()
        .read_json::<serde_json::Value>()
        .map_err(|e| e.to_string())
}

pub struct HttpLlmClient {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpLlmClient {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        api_key: Option<String>,
    ) -> Self {
        HttpLlmClient {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key,
            agent: agent(Duration::from_secs(300)),
        }
    }

    /// Reads `LLM_ENDPOINT`, `LLM_MODEL` and `LLM_API_KEY`.
    pub fn from_env() -> Result<Self, String> {
        let endpoint = env(LLM_ENDPOINT)
            .ok_or_else(|| format!("{LLM_ENDPOINT} is not set (use --mock for offline runs)"))?;
        Ok(Self::new(
            endpoint,
            env(LLM_MODEL).unwrap_or_else(|| "default".into()),
            env(LLM_API_KEY),
        ))
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: String,
}

impl LlmClient for HttpLlmClient {
    fn model_name(&self) -> &str {
        &self.model
    }

    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        request.validate()?;
        let body = json!({
            "model": self.model,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "messages": [{"role": "user", "content": request.prompt}],
        });
        let value = post(&self.agent, &self.endpoint, self.api_key.as_deref(), &body)
            .map_err(LlmError::Transport)?;
        let parsed: ChatResponse = serde_json::from_value(value)
            .map_err(|e| LlmError::Transport(format!("unexpected response: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| LlmError::Transport("response has no choices".into()))
    }
}

pub struct HttpEmbedder {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    dim: usize,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingItem>,
}

#[derive(Deserialize)]
struct EmbeddingItem {
    embedding: Vec<f64>,
    index: Option<usize>,
}

impl HttpEmbedder {
    /// Connects and learns the vector dimension from one probe request.
    pub fn connect(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        api_key: Option<String>,
    ) -> Result<Self, ProviderError> {
        let mut e = HttpEmbedder {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key,
            dim: 0,
            agent: agent(Duration::from_secs(120)),
        };
        let probe = e.request(&["dimension probe"])?;
        e.dim = probe.first().map_or(0, Vec::len);
        if e.dim == 0 {
            return Err(ProviderError(
                "embedding endpoint returned an empty vector".into(),
            ));
        }
        Ok(e)
    }

    /// Reads `EMBED_ENDPOINT`, `EMBED_MODEL` and `EMBED_API_KEY`.
    pub fn from_env() -> Result<Self, ProviderError> {
        let endpoint = env(EMBED_ENDPOINT).ok_or_else(|| {
            ProviderError(format!(
                "{EMBED_ENDPOINT} is not set (use --mock for offline runs)"
            ))
        })?;
        Self::connect(
            endpoint,
            env(EMBED_MODEL).unwrap_or_else(|| "default".into()),
            env(EMBED_API_KEY),
        )
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    fn request(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ProviderError> {
        let body = json!({"model": self.model, "input": texts});
        let value = post(&self.agent, &self.endpoint, self.api_key.as_deref(), &body)
            .map_err(ProviderError)?;
        let mut parsed: EmbeddingResponse = serde_json::from_value(value)
            .map_err(|e| ProviderError(format!("unexpected response: {e}")))?;
        if parsed.data.iter().all(|d| d.index.is_some()) {
            parsed.data.sort_by_key(|d| d.index);
        }
        Ok(parsed.data.into_iter().map(|d| d.embedding).collect())
    }
}

impl EmbeddingProvider for HttpEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<Embedding>, ProviderError> {
        Ok(self
            .request(texts)?
            .into_iter()
            .map(Embedding::new)
            .collect())
    }
}
