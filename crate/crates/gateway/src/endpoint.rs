use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::GatewayError;

pub const DEFAULT_BASE_URL: &str = "http://localhost:8000/v1";
pub const DEFAULT_MODEL: &str = "default";

/// An API key. Never serialized; `Debug` and `Display` print a placeholder.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Secret(String);

impl Secret {
    pub fn new(value: impl Into<String>) -> Self {
        Self(value.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Secret([redacted])")
    }
}

impl fmt::Display for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[redacted]")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEndpoint {
    pub base_url: String,
    pub model_name: String,
    #[serde(skip)]
    pub api_key: Secret,
    /// Sampling temperature for world-model calls; generator calls pick their own.
    pub temperature: f64,
    pub max_retries: usize,
    /// Requests per minute shared by all callers of one client; 0 disables the limit.
    pub rate_limit: u32,
    pub timeout_ms: u64,
}

impl Default for ModelEndpoint {
    fn default() -> Self {
        Self {
            base_url: DEFAULT_BASE_URL.into(),
            model_name: DEFAULT_MODEL.into(),
            api_key: Secret::default(),
            temperature: 0.0,
            max_retries: 3,
            rate_limit: 60,
            timeout_ms: 60_000,
        }
    }
}

impl ModelEndpoint {
    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    pub fn chat_url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(GatewayError::Config(format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if self.base_url.is_empty() {
            return Err(GatewayError::Config("base_url is empty".into()));
        }
        Ok(())
    }

    /// Reads `AUTOHD_API_KEY` (required), `AUTOHD_BASE_URL` and `AUTOHD_MODEL`.
    pub fn from_vars(var: impl Fn(&str) -> Option<String>) -> Result<Self, GatewayError> {
        let key = var("AUTOHD_API_KEY")
            .filter(|k| !k.is_empty())
            .ok_or_else(|| GatewayError::Config("AUTOHD_API_KEY is not set and AUTOHD_FIXTURES is not given".into()))?;
        let mut ep = Self { api_key: Secret::new(key), ..Self::default() };
        if let Some(url) = var("AUTOHD_BASE_URL").filter(|u| !u.is_empty()) {
            ep.base_url = url;
        }
        if let Some(model) = var("AUTOHD_MODEL").filter(|m| !m.is_empty()) {
            ep.model_name = model;
        }
        ep.validate()?;
        Ok(ep)
    }
}
