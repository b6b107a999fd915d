//! A deterministic stand-in for a language model, used to produce fixture
//! sets and to exercise the generator path without a network.

use std::collections::HashMap;
use std::sync::Mutex;

use autohd_core::domains::DomainId;

use crate::{Completer, GatewayError};

const CUBE: [(&str, &str); 4] = [
    ("count faces that are not one color", "6 - count(f in faces(state), uniform(f))"),
    (
        "count stickers that differ from the first sticker of their face",
        "sum(map(f in faces(state), count(x in f, x != at(f, 0))))",
    ),
    (
        "half the mixed faces plus a quarter of the off-color stickers",
        "0.5 * (6 - count(f in faces(state), uniform(f))) + 0.25 * sum(map(f in faces(state), count(x in f, x != at(f, 0))))",
    ),
    ("two per mixed face", "2 * count(f in faces(state), not_uniform_placeholder(f))"),
];

const GAME24: [(&str, &str); 4] = [
    ("distance from the closest reachable value to 24", "min(map(v in results(state), abs(target - v)))"),
    ("numbers left plus the gap of their sum", "len(state) - 1 + abs(target - sum(state)) / 24"),
    ("zero when 24 is reachable, else one per number", "if min(map(v in results(state), abs(target - v))) == 0 then 0 else len(state)"),
    ("gap of the sum to 24", "abs(target - sum(state"),
];

const BLOCKS: [(&str, &str); 4] = [
    (
        "count blocks whose support differs from the goal",
        "count(r in state, count(g in goal, block(g) == block(r) and support(g) != support(r)) > 0)",
    ),
    (
        "misplaced blocks weighted by their height difference",
        "sum(map(r in state, sum(map(g in filter(g in goal, block(g) == block(r)), if support(g) != support(r) then 1 + abs(height(r) - height(g)) else 0))))",
    ),
    ("blocks above the table", "count(r in state, height(r) > 0)"),
    ("twice the misplaced blocks", "2 * count(r in state, count(g in goal, block(g) == block(r) and support(g) != support(r)) > 0"),
];

fn pool(domain: DomainId) -> &'static [(&'static str, &'static str); 4] {
    match domain {
        DomainId::Cube2x2 => &CUBE,
        DomainId::Game24 => &GAME24,
        DomainId::Blocksworld => &BLOCKS,
    }
}

fn detect_domain(prompt: &str) -> Option<DomainId> {
    if prompt.contains("Pocket Cube") {
        Some(DomainId::Cube2x2)
    } else if prompt.contains("Game 24") {
        Some(DomainId::Game24)
    } else if prompt.contains("blocksworld") {
        Some(DomainId::Blocksworld)
    } else {
        None
    }
}

/// Cycles through four canned heuristics per domain; the fourth does not
/// parse, so every fourth proposal goes through a repair round, which is
/// answered with the first heuristic.
#[derive(Debug, Default)]
pub struct ScriptedModel {
    calls: Mutex<HashMap<DomainId, usize>>,
}

impl ScriptedModel {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Completer for ScriptedModel {
    fn complete(&self, prompt: &str, _temperature: f64) -> Result<String, GatewayError> {
        let domain = detect_domain(prompt).ok_or_else(|| GatewayError::Protocol("prompt names no known domain".into()))?;
        let (desc, code) = if prompt.contains("could not be parsed") {
            pool(domain)[0]
        } else {
            let mut calls = self.calls.lock().unwrap_or_else(|p| p.into_inner());
            let k = calls.entry(domain).or_default();
            let pick = pool(domain)[*k % 4];
            *k += 1;
            pick
        };
        Ok(format!("Heuristic Description: {desc}\n```\n{code}\n```\n"))
    }
}
