use std::sync::Arc;

use autohd_core::domains::DomainId;
use autohd_core::evolution::{Candidate, EvolutionType, GeneratorError, GeneratorPort, Operator, Proposal};
use serde::{Deserialize, Serialize};

use crate::extract::extract_heuristic;
use crate::fixtures::prompt_hash;
use crate::prompts::{evolution_prompt, proposal_prompt};
use crate::Completer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptLogEntry {
    pub operator: Operator,
    /// Set for repair prompts.
    pub repair: bool,
    pub hash: String,
    pub temperature: f64,
    pub prompt: String,
}

/// [`GeneratorPort`] backed by a language model.
pub struct LlmGenerator {
    completer: Arc<dyn Completer>,
    pub propose_temperature: f64,
    pub modify_temperature: f64,
    log: Vec<PromptLogEntry>,
}

impl LlmGenerator {
    pub fn new(completer: Arc<dyn Completer>) -> Self {
        Self { completer, propose_temperature: 0.7, modify_temperature: 0.2, log: Vec::new() }
    }

    /// Every prompt sent so far, in order.
    pub fn prompt_log(&self) -> &[PromptLogEntry] {
        &self.log
    }

    fn ask(&mut self, operator: Operator, repair: bool, prompt: String, temperature: f64) -> Result<String, GeneratorError> {
        let reply = self.completer.complete(&prompt, temperature).map_err(|e| GeneratorError(e.to_string()));
        self.log.push(PromptLogEntry { operator, repair, hash: prompt_hash(&prompt), temperature, prompt });
        reply
    }

    fn sample(&mut self, operator: Operator, prompt: String, temperature: f64, n: usize) -> Result<Vec<Proposal>, GeneratorError> {
        (0..n).map(|_| self.ask(operator, false, prompt.clone(), temperature).map(|r| to_proposal(&r))).collect()
    }
}

/// A response without an extractable program is passed on whole, so the
/// parser's diagnostic drives the repair prompt.
fn to_proposal(response: &str) -> Proposal {
    match extract_heuristic(response) {
        Ok(x) => Proposal { description: x.description, source: x.code_block },
        Err(_) => Proposal { description: String::new(), source: response.trim().to_string() },
    }
}

fn repair_prompt(domain: DomainId, failed: &Proposal, diagnostic: &str) -> String {
    format!(
        "{}\nYour previous answer was:\n```\n{}\n```\nIt could not be parsed: {}\nReply again with a corrected heuristic in the requested format.\n",
        proposal_prompt(domain),
        failed.source.trim(),
        diagnostic.trim()
    )
}

impl GeneratorPort for LlmGenerator {
    fn propose(&mut self, domain: DomainId, n: usize) -> Result<Vec<Proposal>, GeneratorError> {
        let t = self.propose_temperature;
        self.sample(Operator::Propose, proposal_prompt(domain), t, n)
    }

    fn explore(
        &mut self,
        domain: DomainId,
        existing: &[Candidate],
        kind: EvolutionType,
        n: usize,
    ) -> Result<Vec<Proposal>, GeneratorError> {
        let t = self.propose_temperature;
        self.sample(Operator::Explore, evolution_prompt(domain, existing, kind), t, n)
    }

    fn modify(
        &mut self,
        domain: DomainId,
        existing: &[Candidate],
        kind: EvolutionType,
        n: usize,
    ) -> Result<Vec<Proposal>, GeneratorError> {
        let t = self.modify_temperature;
        self.sample(Operator::Modify, evolution_prompt(domain, existing, kind), t, n)
    }

    fn repair(&mut self, domain: DomainId, failed: &Proposal, diagnostic: &str) -> Result<Proposal, GeneratorError> {
        let t = self.modify_temperature;
        let reply = self.ask(Operator::Propose, true, repair_prompt(domain, failed, diagnostic), t)?;
        Ok(to_proposal(&reply))
    }
}
