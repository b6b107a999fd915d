//! Model-backed action generator and transition function.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use autohd_core::domains::game24::{fmt_rational, parse_rational};
use autohd_core::domains::{BlocksState, BwAction, DomainId, Game24State, Op};
use autohd_core::task::{Action, GroundTruth, ModelMode, State, WorldModel};
use serde::{Deserialize, Serialize};

use crate::prompts::{render_prompt, PromptTemplate, TemplateKind, ACTION_TEXT, STATE_TEXT};
use crate::{Completer, GatewayError};

const RETRY_NOTE: &str = "\n\nYour previous reply could not be read. Answer again using exactly the format requested above.\n";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldModelStats {
    pub action_calls: usize,
    pub transition_calls: usize,
    pub reprompts: usize,
    /// Well-formed actions that are illegal in the state they were proposed for.
    pub dropped_illegal: usize,
    pub unparsed_lines: usize,
    pub dead_branches: usize,
    pub service_errors: usize,
}

#[derive(Default)]
struct Counters {
    action_calls: AtomicUsize,
    transition_calls: AtomicUsize,
    reprompts: AtomicUsize,
    dropped_illegal: AtomicUsize,
    unparsed_lines: AtomicUsize,
    dead_branches: AtomicUsize,
    service_errors: AtomicUsize,
}

fn bump(c: &AtomicUsize, n: usize) {
    c.fetch_add(n, Ordering::Relaxed);
}

/// Asks a model for the actions of a state and the outcome of an action.
/// Responses are cached per state (and action), so repeated expansions cost
/// nothing. The cube domain is rejected: that domain always runs on the simulator.
pub struct LlmWorldModel {
    completer: Arc<dyn Completer>,
    domain: DomainId,
    pub legality_filter: bool,
    pub temperature: f64,
    counters: Counters,
    action_cache: Mutex<HashMap<String, Vec<Action>>>,
    transition_cache: Mutex<HashMap<(String, String), Option<State>>>,
}

enum LineParse {
    Legal(Action),
    Illegal(Option<Action>),
    Unreadable,
}

impl LlmWorldModel {
    pub fn new(completer: Arc<dyn Completer>, domain: DomainId) -> Result<Self, GatewayError> {
        if domain == DomainId::Cube2x2 {
            return Err(GatewayError::Config("the cube domain uses the ground-truth simulator only".into()));
        }
        Ok(Self {
            completer,
            domain,
            legality_filter: true,
            temperature: 0.0,
            counters: Counters::default(),
            action_cache: Mutex::new(HashMap::new()),
            transition_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn stats(&self) -> WorldModelStats {
        let c = &self.counters;
        let get = |a: &AtomicUsize| a.load(Ordering::Relaxed);
        WorldModelStats {
            action_calls: get(&c.action_calls),
            transition_calls: get(&c.transition_calls),
            reprompts: get(&c.reprompts),
            dropped_illegal: get(&c.dropped_illegal),
            unparsed_lines: get(&c.unparsed_lines),
            dead_branches: get(&c.dead_branches),
            service_errors: get(&c.service_errors),
        }
    }

    /// Sends `prompt`, then once more with a format reminder when `read`
    /// finds nothing usable in the first reply.
    fn ask<T>(&self, prompt: &str, mut read: impl FnMut(&str) -> Option<T>) -> Option<T> {
        for attempt in 0..2 {
            let text = if attempt == 0 { prompt.to_string() } else { format!("{prompt}{RETRY_NOTE}") };
            if attempt == 1 {
                bump(&self.counters.reprompts, 1);
            }
            match self.completer.complete(&text, self.temperature) {
                Ok(reply) => {
                    if let Some(v) = read(&reply) {
                        return Some(v);
                    }
                }
                Err(_) => {
                    bump(&self.counters.service_errors, 1);
                    return None;
                }
            }
        }
        None
    }

    fn parse_line(&self, state: &State, line: &str) -> LineParse {
        let gt = GroundTruth::default();
        match state {
            State::Blocksworld(_) => match BwAction::parse(line) {
                Some(a) => {
                    let a = Action::Blocksworld(a);
                    if gt.actions(state).contains(&a) {
                        LineParse::Legal(a)
                    } else {
                        LineParse::Illegal(Some(a))
                    }
                }
                None => LineParse::Unreadable,
            },
            State::Game24(s) => match s.parse_action(line) {
                Some(a) => LineParse::Legal(Action::Game24(a)),
                None if looks_like_g24_step(line) => LineParse::Illegal(None),
                None => LineParse::Unreadable,
            },
            State::Cube2x2(_) => LineParse::Unreadable,
        }
    }

    fn read_actions(&self, state: &State, reply: &str) -> Option<Vec<Action>> {
        let mut out: Vec<Action> = Vec::new();
        let mut recognized = 0;
        for line in reply.lines().map(clean_line).filter(|l| !l.is_empty()) {
            match self.parse_line(state, line) {
                LineParse::Legal(a) => {
                    recognized += 1;
                    if !out.contains(&a) {
                        out.push(a);
                    }
                }
                LineParse::Illegal(a) => {
                    recognized += 1;
                    match a {
                        Some(a) if !self.legality_filter => {
                            if !out.contains(&a) {
                                out.push(a);
                            }
                        }
                        _ => bump(&self.counters.dropped_illegal, 1),
                    }
                }
                LineParse::Unreadable => bump(&self.counters.unparsed_lines, 1),
            }
        }
        (recognized > 0).then_some(out)
    }

    fn action_text(state: &State, action: &Action) -> String {
        match (state, action) {
            (State::Game24(s), Action::Game24(a)) => {
                let n = s.numbers();
                format!("{} {} {}", fmt_rational(&n[a.left]), a.op.symbol(), fmt_rational(&n[a.right]))
            }
            _ => action.to_string(),
        }
    }

    fn read_state(&self, reply: &str) -> Option<State> {
        let lower = reply.to_ascii_lowercase();
        let tail = |marker: &str| lower.find(marker).map(|i| reply[i + marker.len()..].trim());
        match self.domain {
            DomainId::Blocksworld => {
                let text = tail("new state:").unwrap_or(reply.trim());
                let text = text.lines().next().unwrap_or("");
                BlocksState::parse(text).ok().map(State::Blocksworld)
            }
            DomainId::Game24 => {
                let text = tail("remaining:").unwrap_or(reply.trim());
                Game24State::parse(text).ok().map(State::Game24)
            }
            DomainId::Cube2x2 => None,
        }
    }
}

/// Drops bullets and list numbers such as `-`, `*` or `3.`.
fn clean_line(line: &str) -> &str {
    let t = line.trim().trim_start_matches(['-', '*', '•']).trim();
    let digits = t.len() - t.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    let rest = &t[digits..];
    match rest.chars().next() {
        Some('.' | ')') if digits > 0 && rest[1..].starts_with(char::is_whitespace) => rest[1..].trim(),
        _ => t,
    }
}

/// `a op b` with two numbers, whether or not they are available.
fn looks_like_g24_step(line: &str) -> bool {
    let lhs = line.split('=').next().unwrap_or("").trim();
    lhs.char_indices().skip(1).any(|(i, c)| {
        Op::from_symbol(c).is_some()
            && parse_rational(&lhs[..i]).is_some()
            && parse_rational(&lhs[i + c.len_utf8()..]).is_some()
    })
}

impl WorldModel for LlmWorldModel {
    fn mode(&self) -> ModelMode {
        ModelMode::ModelBacked
    }

    fn actions(&self, state: &State) -> Vec<Action> {
        let key = state.render();
        if let Some(hit) = self.action_cache.lock().unwrap_or_else(|p| p.into_inner()).get(&key) {
            return hit.clone();
        }
        bump(&self.counters.action_calls, 1);
        let Some(t) = PromptTemplate::get(TemplateKind::Actions, self.domain) else {
            return Vec::new();
        };
        let prompt = render_prompt(&t, &[(STATE_TEXT, &key)]).expect("action slots are complete");
        let actions = self.ask(&prompt, |reply| self.read_actions(state, reply)).unwrap_or_default();
        self.action_cache.lock().unwrap_or_else(|p| p.into_inner()).insert(key, actions.clone());
        actions
    }

    fn transition(&self, state: &State, action: &Action) -> Option<State> {
        let key = (state.render(), action.to_string());
        if let Some(hit) = self.transition_cache.lock().unwrap_or_else(|p| p.into_inner()).get(&key) {
            return hit.clone();
        }
        bump(&self.counters.transition_calls, 1);
        let t = PromptTemplate::get(TemplateKind::Transition, self.domain)?;
        let action_text = Self::action_text(state, action);
        let prompt = render_prompt(&t, &[(STATE_TEXT, &key.0), (ACTION_TEXT, &action_text)]).expect("transition slots are complete");
        let next = self.ask(&prompt, |reply| self.read_state(reply));
        if next.is_none() {
            bump(&self.counters.dead_branches, 1);
        }
        self.transition_cache.lock().unwrap_or_else(|p| p.into_inner()).insert(key, next.clone());
        next
    }
}
