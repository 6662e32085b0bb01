//! Scripted LLM clients loaded from TOML.
//!
//! ```toml
//! name = "fixture-mock"            # optional
//! default_response = "I don't know"  # optional, used when no rule matches
//!
//! [[rule]]
//! contains = "CREATE TABLE grants"
//! responses = ["@prefix ...", "..."]
//! ```
//!
//! Rules are tried top to bottom. A rule with several responses hands them
//! out in order and then keeps repeating the last one.

use std::fs;
use std::path::Path;

use ontokg_core::llm::{ScriptRule, ScriptedClient};
use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockScript {
    pub name: Option<String>,
    pub default_response: Option<String>,
    #[serde(default, rename = "rule")]
    pub rules: Vec<ScriptRule>,
}

#[derive(Debug, thiserror::Error)]
pub enum MockError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: String,
        source: toml::de::Error,
    },
    #[error("rule {0} has no responses")]
    EmptyRule(usize),
}

impl MockScript {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, MockError> {
        let text = fs::read_to_string(path).map_err(|source| MockError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let script = Self::parse(&text).map_err(|source| MockError::Toml {
            path: path.display().to_string(),
            source,
        })?;
        if let Some(i) = script.rules.iter().position(|r| r.responses.is_empty()) {
            return Err(MockError::EmptyRule(i + 1));
        }
        Ok(script)
    }

    pub fn client(&self) -> ScriptedClient {
        let mut client = ScriptedClient::new(self.rules.iter().cloned());
        if let Some(name) = &self.name {
            client = client.with_name(name.clone());
        }
        if let Some(fallback) = &self.default_response {
            client = client.with_fallback(fallback.clone());
        }
        client
    }
}
