//! Picks the LLM client and embedding provider: scripted and hashed under
//! `--mock`, HTTP otherwise.

use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use ontokg_core::embed::{EmbeddingProvider, HashedEmbedder};
use ontokg_core::llm::LlmClient;
use ontokg_core::retrieve::Clock;

use crate::http::{HttpEmbedder, HttpLlmClient};
use crate::mock::MockScript;

pub fn llm_client(mock: Option<&Path>) -> Result<Box<dyn LlmClient>> {
    match mock {
        Some(path) => Ok(Box::new(MockScript::load(path)?.client())),
        None => Ok(Box::new(HttpLlmClient::from_env().map_err(|e| anyhow!(e))?)),
    }
}

/// The provider plus a tag recorded in index caches, so that a cache built
/// by one provider is never queried with another.
pub fn embedder(mock: bool) -> Result<(Box<dyn EmbeddingProvider>, String)> {
    if mock {
        let e = HashedEmbedder::new();
        let tag = format!("hashed-{}", e.dim());
        return Ok((Box::new(e), tag));
    }
    let e = HttpEmbedder::from_env()
        .map_err(|e| anyhow!(e.0))
        .context("embedding provider")?;
    let tag = format!("http:{}:{}", e.model(), e.dim());
    Ok((Box::new(e), tag))
}

/// Wall-clock time since construction.
#[derive(Debug, Clone, Copy)]
pub struct InstantClock(Instant);

impl Default for InstantClock {
    fn default() -> Self {
        InstantClock(Instant::now())
    }
}

impl Clock for InstantClock {
    fn now(&self) -> std::time::Duration {
        self.0.elapsed()
    }
}
