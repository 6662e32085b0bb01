//! LLM client abstraction and a scripted, deterministic mock.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub prompt: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl LlmRequest {
    pub const DEFAULT_MAX_TOKENS: u32 = 2048;

    /// A request at temperature 0.
    pub fn new(prompt: impl Into<String>) -> Self {
        LlmRequest {
            prompt: prompt.into(),
            temperature: 0.0,
            max_tokens: Self::DEFAULT_MAX_TOKENS,
        }
    }

    pub fn with_max_tokens(mut self, max_tokens: u32) -> Self {
        self.max_tokens = max_tokens;
        self
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(LlmError::InvalidRequest(
                "temperature must be finite and >= 0".into(),
            ));
        }
        if self.max_tokens == 0 {
            return Err(LlmError::InvalidRequest(
                "max_tokens must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("no scripted response matches prompt starting with {0:?}")]
    Unscripted(String),
}

/// A text-completion model. Implementations must tolerate concurrent calls.
pub trait LlmClient: Send + Sync {
    fn model_name(&self) -> &str;

    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError>;
}

impl<T: LlmClient + ?Sized> LlmClient for &T {
    fn model_name(&self) -> &str {
        (**self).model_name()
    }

    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

impl<T: LlmClient + ?Sized> LlmClient for Box<T> {
    fn model_name(&self) -> &str {
        (**self).model_name()
    }

    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

impl<T: LlmClient + ?Sized> LlmClient for Arc<T> {
    fn model_name(&self) -> &str {
        (**self).model_name()
    }

    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

/// One entry of a scripted client: prompts containing `contains` get the
/// next entry of `responses`; once exhausted the last one repeats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptRule {
    pub contains: String,
    pub responses: Vec<String>,
}

impl ScriptRule {
    pub fn new(
        contains: impl Into<String>,
        responses: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        ScriptRule {
            contains: contains.into(),
            responses: responses.into_iter().map(Into::into).collect(),
        }
    }
}

/// Deterministic mock. Rules are tried in order; the first whose pattern
/// occurs in the prompt answers. An empty pattern matches every prompt.
#[derive(Debug)]
pub struct ScriptedClient {
    name: String,
    rules: Vec<(ScriptRule, AtomicUsize)>,
    fallback: Option<String>,
    calls: AtomicUsize,
}

impl ScriptedClient {
    pub fn new(rules: impl IntoIterator<Item = ScriptRule>) -> Self {
        ScriptedClient {
            name: "scripted-mock".to_string(),
            rules: rules
                .into_iter()
                .filter(|r| !r.responses.is_empty())
                .map(|r| (r, AtomicUsize::new(0)))
                .collect(),
            fallback: None,
            calls: AtomicUsize::new(0),
        }
    }

    /// Response used when no rule matches.
    pub fn with_fallback(mut self, response: impl Into<String>) -> Self {
        self.fallback = Some(response.into());
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of `complete` calls so far, including failed ones.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for ScriptedClient {
    fn model_name(&self) -> &str {
        &self.name
    }

    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        request.validate()?;
        for (rule, cursor) in &self.rules {
            if request.prompt.contains(rule.contains.as_str()) {
                let i = cursor.fetch_add(1, Ordering::SeqCst);
                let last = rule.responses.len() - 1;
                return Ok(rule.responses[i.min(last)].clone());
            }
        }
        match &self.fallback {
            Some(r) => Ok(r.clone()),
            None => Err(LlmError::Unscripted(
                request.prompt.chars().take(60).collect(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_match_in_order_and_sequence() {
        let client = ScriptedClient::new([
            ScriptRule::new("alpha", ["a1", "a2"]),
            ScriptRule::new("", ["anything"]),
        ]);
        assert_eq!(
            client.complete(&LlmRequest::new("x alpha y")).unwrap(),
            "a1"
        );
        assert_eq!(client.complete(&LlmRequest::new("alpha")).unwrap(), "a2");
        assert_eq!(client.complete(&LlmRequest::new("alpha")).unwrap(), "a2");
        assert_eq!(
            client.complete(&LlmRequest::new("beta")).unwrap(),
            "anything"
        );
        assert_eq!(client.calls(), 4);
    }

    #[test]
    fn unscripted_prompt_fails_unless_fallback() {
        let client = ScriptedClient::new([ScriptRule::new("alpha", ["a"])]);
        assert!(matches!(
            client.complete(&LlmRequest::new("beta")),
            Err(LlmError::Unscripted(_))
        ));
        let client = client.with_fallback("I don't know");
        assert_eq!(
            client.complete(&LlmRequest::new("beta")).unwrap(),
            "I don't know"
        );
    }

    #[test]
    fn requests_default_to_temperature_zero() {
        let r = LlmRequest::new("p");
        assert_eq!(r.temperature, 0.0);
        assert!(r.validate().is_ok());
        let mut bad = r.clone();
        bad.temperature = -1.0;
        assert!(bad.validate().is_err());
        assert!(r.with_max_tokens(0).validate().is_err());
    }
}
