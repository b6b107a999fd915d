//! Chat-completion client over HTTPS.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::endpoint::ModelEndpoint;
use crate::{Completer, GatewayError};

static NETWORK_CALLS: AtomicU64 = AtomicU64::new(0);

/// Process-wide count of HTTP requests issued by [`UreqTransport`].
pub fn network_calls() -> u64 {
    NETWORK_CALLS.load(Ordering::SeqCst)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// One POST round trip. `Err` means no HTTP status was obtained.
pub trait Transport: Send + Sync {
    fn post(&self, url: &str, headers: &[(&str, String)], body: &str) -> Result<HttpResponse, String>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        Self { agent }
    }
}

impl Transport for UreqTransport {
    fn post(&self, url: &str, headers: &[(&str, String)], body: &str) -> Result<HttpResponse, String> {
        NETWORK_CALLS.fetch_add(1, Ordering::SeqCst);
        let mut req = self.agent.post(url);
        for (k, v) in headers {
            req = req.header(*k, v.as_str());
        }
        let mut resp = req.send(body).map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok(HttpResponse { status, body })
    }
}

pub trait Sleeper: Send + Sync {
    fn sleep(&self, d: Duration);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// Spaces requests evenly; callers reserve the next free slot under a lock
/// and wait outside it.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next_free: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn per_minute(rate: u32) -> Self {
        let interval = if rate == 0 { Duration::ZERO } else { Duration::from_secs(60) / rate };
        Self { interval, next_free: Mutex::new(None) }
    }

    /// Reserves a slot and returns how long the caller must wait for it.
    pub fn reserve(&self) -> Duration {
        if self.interval.is_zero() {
            return Duration::ZERO;
        }
        let now = Instant::now();
        let mut next = self.next_free.lock().unwrap_or_else(|p| p.into_inner());
        let start = next.map_or(now, |n| n.max(now));
        *next = Some(start + self.interval);
        start - now
    }
}

pub struct ChatClient {
    endpoint: ModelEndpoint,
    transport: Arc<dyn Transport>,
    limiter: Arc<RateLimiter>,
    sleeper: Arc<dyn Sleeper>,
    backoff_base: Duration,
    backoff_cap: Duration,
    retries: AtomicUsize,
}

impl ChatClient {
    pub fn new(endpoint: ModelEndpoint) -> Self {
        let transport = Arc::new(UreqTransport::new(endpoint.timeout()));
        Self::with_transport(endpoint, transport, Arc::new(ThreadSleeper))
    }

    pub fn with_transport(endpoint: ModelEndpoint, transport: Arc<dyn Transport>, sleeper: Arc<dyn Sleeper>) -> Self {
        let limiter = Arc::new(RateLimiter::per_minute(endpoint.rate_limit));
        Self {
            endpoint,
            transport,
            limiter,
            sleeper,
            backoff_base: Duration::from_millis(500),
            backoff_cap: Duration::from_secs(30),
            retries: AtomicUsize::new(0),
        }
    }

    pub fn with_backoff(mut self, base: Duration, cap: Duration) -> Self {
        self.backoff_base = base;
        self.backoff_cap = cap;
        self
    }

    pub fn endpoint(&self) -> &ModelEndpoint {
        &self.endpoint
    }

    /// Retries performed so far across all calls.
    pub fn retries(&self) -> usize {
        self.retries.load(Ordering::SeqCst)
    }

    fn backoff(&self, attempt: usize) -> Duration {
        let factor = 1u32.checked_shl(attempt.min(31) as u32).unwrap_or(u32::MAX);
        self.backoff_base.saturating_mul(factor).min(self.backoff_cap)
    }

    fn request_body(&self, prompt: &str, temperature: f64) -> String {
        json!({
            "model": self.endpoint.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
        })
        .to_string()
    }
}

fn parse_content(body: &str) -> Result<String, GatewayError> {
    let v: Value = serde_json::from_str(body).map_err(|e| GatewayError::Protocol(format!("response is not JSON: {e}")))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| GatewayError::Protocol("response has no choices[0].message.content".into()))
}

fn truncate(s: &str, n: usize) -> String {
    match s.char_indices().nth(n) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.to_string(),
    }
}

impl Completer for ChatClient {
    fn complete(&self, prompt: &str, temperature: f64) -> Result<String, GatewayError> {
        if self.endpoint.timeout_ms == 0 {
            return Err(GatewayError::Transport("timeout is zero".into()));
        }
        let url = self.endpoint.chat_url();
        let body = self.request_body(prompt, temperature);
        let mut headers = vec![("Content-Type", "application/json".to_string())];
        if !self.endpoint.api_key.is_empty() {
            headers.push(("Authorization", format!("Bearer {}", self.endpoint.api_key.expose())));
        }
        let attempts = self.endpoint.max_retries + 1;
        let mut last = String::new();
        for attempt in 0..attempts {
            let wait = self.limiter.reserve();
            if !wait.is_zero() {
                self.sleeper.sleep(wait);
            }
            match self.transport.post(&url, &headers, &body) {
                Ok(r) if (200..300).contains(&r.status) => return parse_content(&r.body),
                Ok(r) if r.status == 429 || r.status >= 500 => last = format!("HTTP {}", r.status),
                Ok(r) => return Err(GatewayError::Permanent { status: r.status, body: truncate(&r.body, 200) }),
                Err(e) => last = e,
            }
            if attempt + 1 < attempts {
                self.retries.fetch_add(1, Ordering::SeqCst);
                self.sleeper.sleep(self.backoff(attempt));
            }
        }
        Err(GatewayError::Exhausted { attempts, last })
    }
}
