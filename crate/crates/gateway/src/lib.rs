//! Model-facing side of the planner: prompt templates, a chat-completion
//! client with retries and rate limiting, offline fixtures, response
//! extraction, and the two model roles (heuristic generator and world model).

pub mod client;
pub mod endpoint;
pub mod extract;
pub mod fixtures;
pub mod generator;
pub mod prompts;
pub mod scripted;
pub mod world;

use std::sync::Arc;

use thiserror::Error;

pub use client::{network_calls, ChatClient, HttpResponse, Sleeper, ThreadSleeper, Transport, UreqTransport};
pub use endpoint::{ModelEndpoint, Secret};
pub use extract::{extract_heuristic, ExtractionResult};
pub use fixtures::{prompt_hash, FixtureClient, Recorder};
pub use generator::{LlmGenerator, PromptLogEntry};
pub use prompts::{render_prompt, PromptTemplate, TemplateKind};
pub use scripted::ScriptedModel;
pub use world::{LlmWorldModel, WorldModelStats};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("request rejected with HTTP {status}: {body}")]
    Permanent { status: u16, body: String },
    #[error("gave up after {attempts} attempts: {last}")]
    Exhausted { attempts: usize, last: String },
    #[error("malformed response: {0}")]
    Protocol(String),
    #[error("no fixture for prompt {hash} in {dir}")]
    MissingFixture { hash: String, dir: String },
    #[error("fixture i/o: {0}")]
    Fixture(String),
    #[error("missing prompt slot <{0}>")]
    MissingSlot(String),
    #[error("no heuristic found in response: {0}")]
    Extraction(String),
    #[error("configuration error: {0}")]
    Config(String),
}

/// Anything that turns a prompt into response text.
pub trait Completer: Send + Sync {
    fn complete(&self, prompt: &str, temperature: f64) -> Result<String, GatewayError>;
}

impl<C: Completer + ?Sized> Completer for Arc<C> {
    fn complete(&self, prompt: &str, temperature: f64) -> Result<String, GatewayError> {
        (**self).complete(prompt, temperature)
    }
}

/// Builds a completer from `AUTOHD_*` environment variables.
///
/// `AUTOHD_FIXTURES` selects offline replay; otherwise `AUTOHD_API_KEY`,
/// `AUTOHD_BASE_URL` and `AUTOHD_MODEL` configure a live client, optionally
/// recording into `AUTOHD_RECORD`.
pub fn from_env() -> Result<Arc<dyn Completer>, GatewayError> {
    from_vars(|name| std::env::var(name).ok())
}

pub fn from_vars(var: impl Fn(&str) -> Option<String>) -> Result<Arc<dyn Completer>, GatewayError> {
    if let Some(dir) = var("AUTOHD_FIXTURES").filter(|d| !d.is_empty()) {
        return Ok(Arc::new(FixtureClient::new(dir)?));
    }
    let endpoint = ModelEndpoint::from_vars(&var)?;
    let client = ChatClient::new(endpoint);
    match var("AUTOHD_RECORD").filter(|d| !d.is_empty()) {
        Some(dir) => Ok(Arc::new(Recorder::new(client, dir)?)),
        None => Ok(Arc::new(client)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_take_precedence_over_live_settings() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_string_lossy().into_owned();
        let c = from_vars(|k| match k {
            "AUTOHD_FIXTURES" => Some(d.clone()),
            "AUTOHD_API_KEY" => Some("sk-live".into()),
            _ => None,
        })
        .unwrap();
        let err = c.complete("hello", 0.0).unwrap_err();
        assert!(matches!(err, GatewayError::MissingFixture { .. }));
    }

    #[test]
    fn live_mode_requires_a_key() {
        assert!(matches!(from_vars(|_| None), Err(GatewayError::Config(_))));
    }
}
