//! Benchmark harness: datasets, oracles, per-instance runs and metrics.

pub mod dataset;
pub mod oracle;
pub mod report;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use web_time::Instant;

pub use dataset::{gen_dataset, load_dataset, read_dataset, write_dataset, DatasetError, DatasetSpec};
pub use oracle::{g24_expression, oracle_solve, OracleResult};
pub use report::{metrics_from_csv, metrics_to_csv, metrics_to_markdown};

use crate::domains::DomainId;
use crate::dsl::CompiledHeuristic;
use crate::search::{search, Algorithm, SearchConfig, SearchStatus};
use crate::task::{validate_plan, GroundTruth, PlanningTask, WorldModel};

/// Search settings applied to every instance. Unset fields fall back to
/// the per-task defaults of [`SearchConfig::for_task`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub expansion_budget: Option<usize>,
    #[serde(default)]
    pub depth_cap: Option<u32>,
    #[serde(default = "one")]
    pub num_solutions: usize,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub jobs: usize,
}

fn one() -> usize {
    1
}

impl BenchConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self { algorithm, expansion_budget: None, depth_cap: None, num_solutions: 1, jobs: 0 }
    }

    pub fn search_config(&self, task: &PlanningTask) -> SearchConfig {
        let mut cfg = SearchConfig::for_task(task, self.algorithm);
        if let Some(b) = self.expansion_budget {
            cfg.expansion_budget = b;
        }
        if let Some(d) = self.depth_cap {
            cfg.depth_cap = d;
        }
        cfg.num_solutions = self.num_solutions.max(1);
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub id: String,
    pub optimal_depth: Option<u32>,
    /// At least one returned plan validates under the ground-truth simulator.
    pub solved: bool,
    pub status: SearchStatus,
    pub plan_length: Option<usize>,
    pub expansions: usize,
    pub heuristic_faults: usize,
    pub reason: String,
    pub plans: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub label: String,
    pub domain: DomainId,
    pub algorithm: Algorithm,
    pub instances: usize,
    pub accuracy: f64,
    pub per_bucket: BTreeMap<u32, f64>,
    pub bucket_counts: BTreeMap<u32, usize>,
    pub mean_expansions: f64,
    pub mean_plan_length: f64,
    pub heuristic_faults: usize,
    pub wall_time_ms: f64,
}

impl Metrics {
    pub fn from_outcomes(
        label: impl Into<String>,
        domain: DomainId,
        algorithm: Algorithm,
        outcomes: &[InstanceOutcome],
        wall_time_ms: f64,
    ) -> Self {
        let n = outcomes.len();
        let solved: Vec<&InstanceOutcome> = outcomes.iter().filter(|o| o.solved).collect();
        let mut hits: BTreeMap<u32, usize> = BTreeMap::new();
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for o in outcomes {
            if let Some(d) = o.optimal_depth {
                *counts.entry(d).or_default() += 1;
                *hits.entry(d).or_default() += usize::from(o.solved);
            }
        }
        let mean = |xs: Vec<f64>| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
        Self {
            label: label.into(),
            domain,
            algorithm,
            instances: n,
            accuracy: if n == 0 { 0.0 } else { solved.len() as f64 / n as f64 },
            per_bucket: counts.iter().map(|(d, c)| (*d, hits[d] as f64 / *c as f64)).collect(),
            bucket_counts: counts,
            mean_expansions: mean(solved.iter().map(|o| o.expansions as f64).collect()),
            mean_plan_length: mean(solved.iter().filter_map(|o| o.plan_length.map(|l| l as f64)).collect()),
            heuristic_faults: outcomes.iter().map(|o| o.heuristic_faults).sum(),
            wall_time_ms,
        }
    }
}

/// Solves and validates one instance.
pub fn run_instance(
    task: &PlanningTask,
    h: &CompiledHeuristic,
    model: Option<&dyn WorldModel>,
    cfg: &BenchConfig,
) -> InstanceOutcome {
    let gt = GroundTruth::for_task(task);
    let model: &dyn WorldModel = model.unwrap_or(&gt);
    let result = search(task, model, h, &cfg.search_config(task));
    let mut first_valid = None;
    let mut reason = result.status.to_string();
    for plan in &result.plans {
        let v = validate_plan(task, plan, &gt);
        if v.valid {
            first_valid.get_or_insert(plan.len());
        } else {
            reason = v.reason;
        }
    }
    InstanceOutcome {
        id: task.instance_id.clone(),
        optimal_depth: task.optimal_depth,
        solved: first_valid.is_some(),
        status: result.status,
        plan_length: first_valid,
        expansions: result.stats.expansions,
        heuristic_faults: result.stats.heuristic_faults,
        reason: if first_valid.is_some() { "ok".into() } else { reason },
        plans: result.plans.iter().map(|p| p.describe()).collect(),
    }
}

/// Runs every task; outcomes are returned in dataset order regardless of
/// scheduling. `model = None` uses the ground-truth simulator.
pub fn run_bench(
    label: &str,
    tasks: &[PlanningTask],
    h: &CompiledHeuristic,
    model: Option<&dyn WorldModel>,
    cfg: &BenchConfig,
) -> Result<(Metrics, Vec<InstanceOutcome>), DatasetError> {
    let first = tasks.first().ok_or(DatasetError::Empty)?;
    let start = Instant::now();
    let outcomes = map_tasks(tasks, cfg.jobs, |t| run_instance(t, h, model, cfg));
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let metrics = Metrics::from_outcomes(label, first.domain(), cfg.algorithm, &outcomes, wall);
    Ok((metrics, outcomes))
}

#[cfg(feature = "parallel")]
pub(crate) fn map_tasks<T, F>(tasks: &[PlanningTask], jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&PlanningTask) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match jobs {
        1 => return tasks.iter().map(f).collect(),
        0 => return tasks.par_iter().map(&f).collect(),
        _ => {}
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build();
    match pool {
        Ok(pool) => pool.install(|| tasks.par_iter().map(&f).collect()),
        Err(_) => tasks.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_tasks<T, F>(tasks: &[PlanningTask], _jobs: usize, f: F) -> Vec<T>
where
    F: Fn(&PlanningTask) -> T,
{
    tasks.iter().map(f).collect()
}
