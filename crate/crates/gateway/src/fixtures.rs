//! Offline replay and recording of model responses keyed by prompt hash.
//!
//! The k-th request (from 0) for a prompt with hash `h` reads `h-k.txt`,
//! falling back to `h.txt`; the first request reads `h.txt` directly.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use sha2::{Digest, Sha256};

use crate::{Completer, GatewayError};

/// First 16 hex digits of the SHA-256 of the prompt text.
pub fn prompt_hash(prompt: &str) -> String {
    let digest = Sha256::digest(prompt.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn fixture_name(hash: &str, k: usize) -> String {
    if k == 0 {
        format!("{hash}.txt")
    } else {
        format!("{hash}-{k}.txt")
    }
}

#[derive(Debug, Default)]
struct Counters(Mutex<HashMap<String, usize>>);

impl Counters {
    fn next(&self, hash: &str) -> usize {
        let mut m = self.0.lock().unwrap_or_else(|p| p.into_inner());
        let k = m.entry(hash.to_string()).or_default();
        *k += 1;
        *k - 1
    }
}

#[derive(Debug)]
pub struct FixtureClient {
    dir: PathBuf,
    counters: Counters,
    served: Mutex<usize>,
}

impl FixtureClient {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, GatewayError> {
        let dir = dir.into();
        if !dir.is_dir() {
            return Err(GatewayError::Config(format!("fixture directory {} does not exist", dir.display())));
        }
        Ok(Self { dir, counters: Counters::default(), served: Mutex::new(0) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Responses served so far.
    pub fn served(&self) -> usize {
        *self.served.lock().unwrap_or_else(|p| p.into_inner())
    }
}

impl Completer for FixtureClient {
    fn complete(&self, prompt: &str, _temperature: f64) -> Result<String, GatewayError> {
        let hash = prompt_hash(prompt);
        let k = self.counters.next(&hash);
        let candidates = [self.dir.join(fixture_name(&hash, k)), self.dir.join(fixture_name(&hash, 0))];
        for path in &candidates {
            if path.is_file() {
                let text = fs::read_to_string(path).map_err(|e| GatewayError::Fixture(format!("{}: {e}", path.display())))?;
                *self.served.lock().unwrap_or_else(|p| p.into_inner()) += 1;
                return Ok(text);
            }
        }
        Err(GatewayError::MissingFixture { hash, dir: self.dir.display().to_string() })
    }
}

/// Forwards to a live completer and stores every response under the
/// fixture naming scheme, alongside the prompt that produced it.
pub struct Recorder<C> {
    inner: C,
    dir: PathBuf,
    counters: Counters,
}

impl<C: Completer> Recorder<C> {
    pub fn new(inner: C, dir: impl Into<PathBuf>) -> Result<Self, GatewayError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| GatewayError::Fixture(format!("{}: {e}", dir.display())))?;
        Ok(Self { inner, dir, counters: Counters::default() })
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }
}

impl<C: Completer> Completer for Recorder<C> {
    fn complete(&self, prompt: &str, temperature: f64) -> Result<String, GatewayError> {
        let text = self.inner.complete(prompt, temperature)?;
        let hash = prompt_hash(prompt);
        let k = self.counters.next(&hash);
        let io = |e: std::io::Error| GatewayError::Fixture(e.to_string());
        fs::write(self.dir.join(fixture_name(&hash, k)), &text).map_err(io)?;
        fs::write(self.dir.join(format!("{hash}.prompt")), prompt).map_err(io)?;
        Ok(text)
    }
}
