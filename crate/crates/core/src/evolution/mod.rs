//! Population-based heuristic evolution.
//!
//! Generation 0 asks a [`GeneratorPort`] for `b` proposals. Each later
//! generation asks for `b` exploration and `b` modification offspring of the
//! previous members, evaluates them on a validation set, keeps the better
//! half and samples `b` survivors. The [`Archive`] keeps the best candidate
//! of every generation; members do not carry over on their own.

pub mod stub;

use std::collections::HashSet;
use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::{run_bench, BenchConfig};
use crate::domains::DomainId;
use crate::dsl::{parser, program_id, HeuristicProgram, ProgramKind};
use crate::task::{PlanningTask, WorldModel};

pub use stub::StubGenerator;

/// Raw generator output before parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposal {
    pub description: String,
    pub source: String,
}

/// The four offspring prompts. Exploration uses 1 and 2, modification 3 and 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum EvolutionType {
    NewForm = 1,
    Inspired = 2,
    Modified = 3,
    Reparameterized = 4,
}

impl EvolutionType {
    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Self::NewForm),
            2 => Some(Self::Inspired),
            3 => Some(Self::Modified),
            4 => Some(Self::Reparameterized),
            _ => None,
        }
    }
}

impl From<EvolutionType> for u8 {
    fn from(t: EvolutionType) -> u8 {
        t.number()
    }
}

impl TryFrom<u8> for EvolutionType {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, String> {
        Self::from_number(n).ok_or_else(|| format!("evolution type must be 1..=4, got {n}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Propose,
    Explore,
    Modify,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("generator failure: {0}")]
pub struct GeneratorError(pub String);

/// Source of heuristic proposals. Calls may fail; failures are retried by
/// the caller up to its retry cap.
pub trait GeneratorPort {
    fn propose(&mut self, domain: DomainId, n: usize) -> Result<Vec<Proposal>, GeneratorError>;

    fn explore(
        &mut self,
        domain: DomainId,
        existing: &[Candidate],
        kind: EvolutionType,
        n: usize,
    ) -> Result<Vec<Proposal>, GeneratorError>;

    fn modify(
        &mut self,
        domain: DomainId,
        existing: &[Candidate],
        kind: EvolutionType,
        n: usize,
    ) -> Result<Vec<Proposal>, GeneratorError>;

    /// One self-repair attempt for a proposal that failed to parse.
    fn repair(&mut self, domain: DomainId, failed: &Proposal, diagnostic: &str) -> Result<Proposal, GeneratorError>;
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidateStats {
    pub solved: usize,
    pub instances: usize,
    /// Mean expansions over solved instances; 0 when none solved.
    pub mean_expansions: f64,
    pub heuristic_faults: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lineage {
    pub operator: Operator,
    pub evolution_type: Option<EvolutionType>,
    pub parents: Vec<String>,
    /// The proposal was parsed only after a self-repair round.
    pub repaired: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub description: String,
    pub source: String,
    pub domain: DomainId,
    pub kind: ProgramKind,
    pub accuracy: f64,
    pub stats: CandidateStats,
    pub generation_born: usize,
    /// Parse diagnostic of a program that never parsed.
    pub disqualified: Option<String>,
    pub lineage: Lineage,
}

impl Candidate {
    pub fn program(&self) -> Option<HeuristicProgram> {
        if self.disqualified.is_some() {
            return None;
        }
        match self.kind {
            ProgramKind::DslSource => HeuristicProgram::dsl(self.domain, self.description.clone(), self.source.clone()).ok(),
            ProgramKind::Builtin => HeuristicProgram::builtin(&self.source, self.domain).ok(),
        }
    }

    fn from_program(p: &HeuristicProgram, generation: usize, lineage: Lineage) -> Self {
        Self {
            id: p.id.clone(),
            description: p.description.clone(),
            source: p.source.clone(),
            domain: p.domain,
            kind: p.kind,
            accuracy: 0.0,
            stats: CandidateStats::default(),
            generation_born: generation,
            disqualified: None,
            lineage,
        }
    }

    fn disqualified(domain: DomainId, proposal: &Proposal, diagnostic: String, generation: usize, lineage: Lineage) -> Self {
        Self {
            id: program_id(ProgramKind::DslSource, &proposal.source, domain),
            description: proposal.description.clone(),
            source: proposal.source.clone(),
            domain,
            kind: ProgramKind::DslSource,
            accuracy: 0.0,
            stats: CandidateStats::default(),
            generation_born: generation,
            disqualified: Some(diagnostic),
            lineage,
        }
    }
}

/// Selection order: accuracy descending, then fewer mean expansions, then id.
pub fn rank_order(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    b.accuracy
        .total_cmp(&a.accuracy)
        .then(a.stats.mean_expansions.total_cmp(&b.stats.mean_expansions))
        .then_with(|| a.id.cmp(&b.id))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub members: Vec<Candidate>,
    pub generation_index: usize,
    pub b: usize,
}

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("generator failed after {} attempts: {}", attempts.len(), attempts.join("; "))]
    Generator { attempts: Vec<String> },
}

/// Validation-set scorer for candidates.
pub struct Evaluator<'a> {
    pub validation: Vec<PlanningTask>,
    pub config: BenchConfig,
    /// `None` uses the ground-truth simulator.
    pub model: Option<&'a dyn WorldModel>,
}

impl<'a> Evaluator<'a> {
    pub fn new(validation: Vec<PlanningTask>, config: BenchConfig) -> Self {
        Self { validation, config, model: None }
    }

    pub fn domain(&self) -> Option<DomainId> {
        self.validation.first().map(|t| t.domain())
    }

    /// Fills accuracy and stats. Disqualified candidates score 0.
    pub fn evaluate(&self, mut c: Candidate) -> Candidate {
        c.stats = CandidateStats { instances: self.validation.len(), ..Default::default() };
        c.accuracy = 0.0;
        let Some(program) = c.program() else { return c };
        let compiled = program.compile().expect("candidate programs parse");
        let (metrics, outcomes) =
            run_bench(&c.id, &self.validation, &compiled, self.model, &self.config).expect("validation set is nonempty");
        c.accuracy = metrics.accuracy;
        c.stats.solved = outcomes.iter().filter(|o| o.solved).count();
        c.stats.mean_expansions = metrics.mean_expansions;
        c.stats.heuristic_faults = metrics.heuristic_faults;
        c
    }
}

/// Scores one program on a validation set.
pub fn evaluate_candidate(
    program: &HeuristicProgram,
    validation: &[PlanningTask],
    model: Option<&dyn WorldModel>,
    config: &BenchConfig,
) -> Result<Candidate, EvolutionError> {
    if validation.is_empty() {
        return Err(EvolutionError::Precondition("validation set is empty".into()));
    }
    let lineage = Lineage { operator: Operator::Propose, evolution_type: None, parents: vec![], repaired: false };
    let evaluator = Evaluator { validation: validation.to_vec(), config: *config, model };
    Ok(evaluator.evaluate(Candidate::from_program(program, 0, lineage)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub b: usize,
    pub generations: usize,
    pub seed: u64,
    /// Extra generator calls allowed per request after failures.
    pub retry_cap: usize,
}

impl EvolutionConfig {
    pub fn new(b: usize, generations: usize, seed: u64) -> Self {
        Self { b, generations, seed, retry_cap: 2 }
    }
}

/// Drives the generator, turning proposals into candidates.
pub struct Evolver<'g, G: GeneratorPort + ?Sized> {
    pub generator: &'g mut G,
    pub domain: DomainId,
    pub config: EvolutionConfig,
    rng: ChaCha8Rng,
    explore_calls: usize,
    modify_calls: usize,
}

impl<'g, G: GeneratorPort + ?Sized> Evolver<'g, G> {
    pub fn new(generator: &'g mut G, domain: DomainId, config: EvolutionConfig) -> Self {
        Self { generator, domain, config, rng: ChaCha8Rng::seed_from_u64(config.seed), explore_calls: 0, modify_calls: 0 }
    }

    /// Type for the next exploration call: 1, 2, 1, 2, ...
    pub fn next_explore_type(&mut self) -> EvolutionType {
        self.explore_calls += 1;
        if self.explore_calls % 2 == 1 {
            EvolutionType::NewForm
        } else {
            EvolutionType::Inspired
        }
    }

    /// Type for the next modification call: 3, 4, 3, 4, ...
    pub fn next_modify_type(&mut self) -> EvolutionType {
        self.modify_calls += 1;
        if self.modify_calls % 2 == 1 {
            EvolutionType::Modified
        } else {
            EvolutionType::Reparameterized
        }
    }

    fn call<T>(
        &mut self,
        mut f: impl FnMut(&mut G) -> Result<T, GeneratorError>,
    ) -> Result<T, EvolutionError> {
        let mut attempts = Vec::new();
        for _ in 0..=self.config.retry_cap {
            match f(self.generator) {
                Ok(v) => return Ok(v),
                Err(e) => attempts.push(e.0),
            }
        }
        Err(EvolutionError::Generator { attempts })
    }

    /// Parses a proposal, allowing one self-repair round.
    fn admit(&mut self, p: &Proposal, generation: usize, lineage: Lineage) -> Result<Candidate, EvolutionError> {
        let domain = self.domain;
        match parser::parse(&p.source, domain) {
            Ok(_) => Ok(program(domain, p, generation, lineage)),
            Err(first) => {
                let diag = first.to_string();
                let fixed = self.call(|g| g.repair(domain, p, &diag))?;
                match parser::parse(&fixed.source, domain) {
                    Ok(_) => Ok(program(domain, &fixed, generation, Lineage { repaired: true, ..lineage })),
                    Err(second) => Ok(Candidate::disqualified(domain, &fixed, second.to_string(), generation, lineage)),
                }
            }
        }
    }

    /// Generation 0: exactly `b` candidates. A slot whose proposal stays
    /// unparseable after repair is re-requested up to the retry cap, then
    /// kept as a disqualified placeholder.
    pub fn init_population(&mut self, evaluator: &Evaluator) -> Result<Population, EvolutionError> {
        let b = self.config.b;
        if b < 2 {
            return Err(EvolutionError::Precondition(format!("population size b must be at least 2, got {b}")));
        }
        let domain = self.domain;
        let proposals = self.call(|g| g.propose(domain, b))?;
        let lineage = Lineage { operator: Operator::Propose, evolution_type: None, parents: vec![], repaired: false };
        let mut members = Vec::with_capacity(b);
        for slot in 0..b {
            let mut c = match proposals.get(slot) {
                Some(p) => self.admit(p, 0, lineage.clone())?,
                None => Candidate::disqualified(
                    domain,
                    &Proposal { description: String::new(), source: String::new() },
                    "generator returned too few proposals".into(),
                    0,
                    lineage.clone(),
                ),
            };
            let mut retries = 0;
            while c.disqualified.is_some() && retries < self.config.retry_cap {
                retries += 1;
                let again = self.call(|g| g.propose(domain, 1))?;
                if let Some(p) = again.first() {
                    c = self.admit(p, 0, lineage.clone())?;
                }
            }
            members.push(c);
        }
        let mut members: Vec<Candidate> = members.into_iter().map(|c| evaluator.evaluate(c)).collect();
        members.sort_by(rank_order);
        Ok(Population { members, generation_index: 0, b })
    }

    /// One generation: offspring, evaluation, truncation to the better half
    /// and a seeded sample of at most `b` survivors (rank order preserved).
    pub fn step_generation(&mut self, pop: &Population, evaluator: &Evaluator) -> Result<Population, EvolutionError> {
        if pop.members.is_empty() {
            return Err(EvolutionError::Precondition("population is empty".into()));
        }
        let b = pop.b;
        let generation = pop.generation_index + 1;
        let domain = self.domain;
        let parents: Vec<String> = pop.members.iter().map(|c| c.id.clone()).collect();

        let ty = self.next_explore_type();
        let explored = self.call(|g| g.explore(domain, &pop.members, ty, b))?;
        let explore_lineage =
            Lineage { operator: Operator::Explore, evolution_type: Some(ty), parents: parents.clone(), repaired: false };
        let ty = self.next_modify_type();
        let modified = self.call(|g| g.modify(domain, &pop.members, ty, b))?;
        let modify_lineage = Lineage { operator: Operator::Modify, evolution_type: Some(ty), parents, repaired: false };

        let mut pool = Vec::new();
        let mut seen = HashSet::new();
        for (p, lineage) in explored
            .iter()
            .map(|p| (p, &explore_lineage))
            .chain(modified.iter().map(|p| (p, &modify_lineage)))
        {
            let c = self.admit(p, generation, lineage.clone())?;
            if seen.insert(c.id.clone()) {
                pool.push(c);
            }
        }
        let mut pool: Vec<Candidate> = pool.into_iter().map(|c| evaluator.evaluate(c)).collect();
        pool.sort_by(rank_order);
        // keep at least one so a tiny pool cannot wipe out the population
        pool.truncate((pool.len() / 2).max(1));
        let members = if pool.len() > b {
            let mut picked = sample(&mut self.rng, pool.len(), b).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| pool[i].clone()).collect()
        } else {
            pool
        };
        Ok(Population { members, generation_index: generation, b })
    }
}

fn program(domain: DomainId, p: &Proposal, generation: usize, lineage: Lineage) -> Candidate {
    let hp = HeuristicProgram::dsl(domain, p.description.clone(), p.source.clone()).expect("checked by caller");
    Candidate::from_program(&hp, generation, lineage)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub index: usize,
    pub members: Vec<Candidate>,
    pub best: Candidate,
    /// Accuracy of the best candidate seen in this or any earlier generation.
    pub running_best_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineageEntry {
    pub child: String,
    pub generation: usize,
    pub operator: Operator,
    pub evolution_type: Option<EvolutionType>,
    pub parents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    pub domain: DomainId,
    pub config: EvolutionConfig,
    pub generations: Vec<GenerationRecord>,
    pub global_best: Candidate,
    pub lineage: Vec<LineageEntry>,
}

impl Archive {
    fn record(&mut self, pop: &Population) {
        let best = pop.members.first().cloned().unwrap_or_else(|| self.global_best.clone());
        if rank_order(&best, &self.global_best).is_lt() {
            self.global_best = best.clone();
        }
        for c in &pop.members {
            if c.generation_born == pop.generation_index {
                self.lineage.push(LineageEntry {
                    child: c.id.clone(),
                    generation: pop.generation_index,
                    operator: c.lineage.operator,
                    evolution_type: c.lineage.evolution_type,
                    parents: c.lineage.parents.clone(),
                });
            }
        }
        self.generations.push(GenerationRecord {
            index: pop.generation_index,
            members: pop.members.clone(),
            best,
            running_best_accuracy: self.global_best.accuracy,
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("archive serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Frozen best heuristic in standalone file form.
    pub fn best_program(&self) -> Option<HeuristicProgram> {
        self.global_best.program()
    }
}

impl fmt::Display for Archive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.generations {
            writeln!(
                f,
                "generation {}: best {:.3} ({}), running best {:.3}",
                g.index, g.best.accuracy, g.best.id, g.running_best_accuracy
            )?;
        }
        write!(f, "global best {} with accuracy {:.3}", self.global_best.id, self.global_best.accuracy)
    }
}

/// Full run: generation 0 plus `config.generations` further generations.
pub fn evolve<G: GeneratorPort + ?Sized>(
    generator: &mut G,
    evaluator: &Evaluator,
    config: EvolutionConfig,
) -> Result<Archive, EvolutionError> {
    evolve_with_progress(generator, evaluator, config, &mut |_| {})
}

/// Like [`evolve`], reporting each generation record as it completes.
pub fn evolve_with_progress<G: GeneratorPort + ?Sized>(
    generator: &mut G,
    evaluator: &Evaluator,
    config: EvolutionConfig,
    progress: &mut dyn FnMut(&GenerationRecord),
) -> Result<Archive, EvolutionError> {
    if config.generations < 1 {
        return Err(EvolutionError::Precondition("at least one generation is required".into()));
    }
    let domain = evaluator
        .domain()
        .ok_or_else(|| EvolutionError::Precondition("validation set is empty".into()))?;
    let mut evolver = Evolver::new(generator, domain, config);
    let mut pop = evolver.init_population(evaluator)?;
    let mut archive = Archive {
        domain,
        config,
        generations: Vec::new(),
        global_best: pop.members[0].clone(),
        lineage: Vec::new(),
    };
    archive.record(&pop);
    progress(archive.generations.last().expect("just recorded"));
    for _ in 0..config.generations {
        pop = evolver.step_generation(&pop, evaluator)?;
        archive.record(&pop);
        progress(archive.generations.last().expect("just recorded"));
    }
    Ok(archive)
}
