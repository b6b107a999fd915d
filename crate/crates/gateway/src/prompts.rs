//! Prompt templates with `<slot>` markers.

use std::fmt;

use autohd_core::domains::DomainId;
use autohd_core::evolution::{Candidate, EvolutionType};

use crate::GatewayError;

/// Slot names used by the heuristic templates; the misspelling is part of
/// the template text.
pub const EXISTING_HEURISTICS: &str = "exisiting_heuristics";
pub const EVOLUTION_TYPE: &str = "evolution_type";
pub const STATE_TEXT: &str = "state_text";
pub const ACTION_TEXT: &str = "action_text";

const EVOLUTION_TYPES: &str = include_str!("../prompts/evolution_types.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateKind {
    Proposal,
    Evolution,
    Actions,
    Transition,
}

impl TemplateKind {
    pub fn name(self) -> &'static str {
        match self {
            TemplateKind::Proposal => "proposal",
            TemplateKind::Evolution => "evolution",
            TemplateKind::Actions => "actions",
            TemplateKind::Transition => "transition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub name: String,
    pub domain: DomainId,
    pub body: &'static str,
}

impl fmt::Display for PromptTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn body(kind: TemplateKind, domain: DomainId) -> Option<&'static str> {
    use DomainId::*;
    use TemplateKind::*;
    Some(match (kind, domain) {
        (Proposal, Blocksworld) => include_str!("../prompts/proposal_blocksworld.txt"),
        (Proposal, Game24) => include_str!("../prompts/proposal_game24.txt"),
        (Proposal, Cube2x2) => include_str!("../prompts/proposal_cube2x2.txt"),
        (Evolution, Blocksworld) => include_str!("../prompts/evolution_blocksworld.txt"),
        (Evolution, Game24) => include_str!("../prompts/evolution_game24.txt"),
        (Evolution, Cube2x2) => include_str!("../prompts/evolution_cube2x2.txt"),
        (Actions, Blocksworld) => include_str!("../prompts/actions_blocksworld.txt"),
        (Actions, Game24) => include_str!("../prompts/actions_game24.txt"),
        (Transition, Blocksworld) => include_str!("../prompts/transition_blocksworld.txt"),
        (Transition, Game24) => include_str!("../prompts/transition_game24.txt"),
        // the cube always uses the ground-truth simulator
        (Actions | Transition, Cube2x2) => return None,
    })
}

impl PromptTemplate {
    pub fn get(kind: TemplateKind, domain: DomainId) -> Option<Self> {
        body(kind, domain).map(|body| Self { name: format!("{}_{}", kind.name(), domain), domain, body })
    }

    /// Slot names in order of first appearance.
    pub fn slots(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for (_, _, name) in markers(self.body) {
            if !out.contains(&name) {
                out.push(name);
            }
        }
        out
    }
}

/// `(start, end, name)` of every `<name>` marker with `name` in `[a-z_]+`.
fn markers(text: &str) -> Vec<(usize, usize, &str)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'<' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_lowercase() || bytes[j] == b'_') {
                j += 1;
            }
            if j > i + 1 && j < bytes.len() && bytes[j] == b'>' {
                out.push((i, j + 1, &text[i + 1..j]));
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Fills every marker in one pass; slot values are inserted verbatim and
/// not rescanned. Unused slots are ignored.
pub fn render_prompt(template: &PromptTemplate, slots: &[(&str, &str)]) -> Result<String, GatewayError> {
    let mut out = String::with_capacity(template.body.len());
    let mut last = 0;
    for (start, end, name) in markers(template.body) {
        let value = slots
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| GatewayError::MissingSlot(name.to_string()))?;
        out.push_str(&template.body[last..start]);
        out.push_str(value);
        last = end;
    }
    out.push_str(&template.body[last..]);
    Ok(out)
}

/// Text of evolution type `ty` without its list number.
pub fn evolution_type_text(ty: EvolutionType) -> &'static str {
    let prefix = ty.number();
    EVOLUTION_TYPES
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{prefix}. ")))
        .expect("evolution_types.txt lists types 1-4")
}

/// The block inserted at the existing-heuristics marker.
pub fn format_existing(candidates: &[Candidate]) -> String {
    let mut out = String::from("Existing heuristics:");
    for (i, c) in candidates.iter().enumerate() {
        out.push_str(&format!("\n\nHeuristic {}:\nHeuristic Description: {}\n```\n{}\n```", i + 1, c.description.trim(), c.source.trim()));
    }
    out
}

pub fn proposal_prompt(domain: DomainId) -> String {
    let t = PromptTemplate::get(TemplateKind::Proposal, domain).expect("every domain has a proposal template");
    render_prompt(&t, &[]).expect("proposal templates have no slots")
}

pub fn evolution_prompt(domain: DomainId, existing: &[Candidate], ty: EvolutionType) -> String {
    let t = PromptTemplate::get(TemplateKind::Evolution, domain).expect("every domain has an evolution template");
    let existing = format_existing(existing);
    render_prompt(&t, &[(EXISTING_HEURISTICS, &existing), (EVOLUTION_TYPE, evolution_type_text(ty))])
        .expect("evolution slots are complete")
}
