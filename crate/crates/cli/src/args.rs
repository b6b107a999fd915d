//! Flag definitions. Every value flag is optional so that an explicit flag
//! can be told apart from one filled in by `--config`; defaults are applied
//! after the merge and listed in each flag's help text.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "autohd", version, about = "Evolve planning heuristics and search with them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a heuristic on a validation set and write the archive
    Evolve(EvolveArgs),
    /// Solve one instance and print the plan(s)
    Solve(SolveArgs),
    /// Run a heuristic over a dataset and report accuracy
    Bench(BenchArgs),
    /// Compute exact optimal depths by exhaustive search
    Oracle(OracleArgs),
    /// Generate an oracle-labelled dataset as JSON lines
    GenDataset(GenDatasetArgs),
    /// Summarize an archive, heuristic file or dataset
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmArg {
    Astar,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchAlgorithmArg {
    Astar,
    Greedy,
    /// Greedy BFS and A* on the same dataset, one row each
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorArg {
    Stub,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldArg {
    #[serde(alias = "ground-truth")]
    GroundTruth,
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveSetArg {
    Full,
    Reduced,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveArgs {
    /// JSON file with default values for any flag below; explicit flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Domain: blocksworld, game24 or cube2x2 [required]
    #[arg(long)]
    pub domain: Option<String>,
    /// Validation dataset (JSON lines) [required]
    #[arg(long)]
    pub validation: Option<PathBuf>,
    /// Population size [default: 4]
    #[arg(long)]
    pub b: Option<usize>,
    /// Generations after the initial one [default: 5]
    #[arg(long)]
    pub generations: Option<usize>,
    /// Heuristic source [default: stub]
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorArg>,
    /// Search used for validation [default: astar]
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    /// Expansion budget per instance [default: domain budget]
    #[arg(long)]
    pub budget: Option<usize>,
    /// Plan length cap [default: domain cap, tightened to 2x the known optimum]
    #[arg(long)]
    pub depth_cap: Option<u32>,
    /// Dynamics used for validation [default: ground-truth]
    #[arg(long, value_enum)]
    pub world: Option<WorldArg>,
    /// Generator retries per request after failures [default: 2]
    #[arg(long)]
    pub retry_cap: Option<usize>,
    /// Seed for survivor sampling and the stub generator [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses all cores [default: 0]
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Archive output path [default: archive.json]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write every prompt sent to the model as JSON [default: none]
    #[arg(long)]
    pub prompt_log: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveArgs {
    /// JSON file with default values for any flag below; explicit flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Domain: blocksworld, game24 or cube2x2 [required]
    #[arg(long)]
    pub domain: Option<String>,
    /// Instance: a dataset file, one JSON record, numbers for game24, 24 facelets for the cube, or an initial-state description for blocksworld [required]
    #[arg(long, allow_hyphen_values = true)]
    pub instance: Option<String>,
    /// Record to take when --instance is a dataset file, counted from 0 [default: 0]
    #[arg(long)]
    pub index: Option<usize>,
    /// Goal description for a blocksworld --instance given as text
    #[arg(long)]
    pub goal: Option<String>,
    /// builtin:<name>, a heuristic file or an archive JSON [default: the domain's builtin]
    #[arg(long)]
    pub heuristic: Option<String>,
    /// Search algorithm [default: astar]
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    /// Distinct plans to collect [default: 1]
    #[arg(long)]
    pub num_solutions: Option<usize>,
    /// Expansion budget [default: domain budget]
    #[arg(long)]
    pub budget: Option<usize>,
    /// Plan length cap [default: domain cap, tightened to 2x the known optimum]
    #[arg(long)]
    pub depth_cap: Option<u32>,
    /// Dynamics: simulator or model-backed via the AUTOHD_* environment [default: ground-truth]
    #[arg(long, value_enum)]
    pub world: Option<WorldArg>,
    /// Keep model-proposed actions that the simulator rejects [default: off]
    #[arg(long)]
    #[serde(default)]
    pub no_legality_filter: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchArgs {
    /// JSON file with default values for any flag below; explicit flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Domain: blocksworld, game24 or cube2x2 [required]
    #[arg(long)]
    pub domain: Option<String>,
    /// Dataset (JSON lines) [required]
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// builtin:<name>, a heuristic file or an archive JSON [default: the domain's builtin]
    #[arg(long)]
    pub heuristic: Option<String>,
    /// Search algorithm(s) [default: astar]
    #[arg(long, value_enum)]
    pub algorithm: Option<BenchAlgorithmArg>,
    /// Distinct plans per instance; solved if any is valid [default: 1]
    #[arg(long)]
    pub num_solutions: Option<usize>,
    /// Expansion budget per instance [default: domain budget]
    #[arg(long)]
    pub budget: Option<usize>,
    /// Plan length cap [default: domain cap, tightened to 2x the known optimum]
    #[arg(long)]
    pub depth_cap: Option<u32>,
    /// Dynamics: simulator or model-backed via the AUTOHD_* environment [default: ground-truth]
    #[arg(long, value_enum)]
    pub world: Option<WorldArg>,
    /// Keep model-proposed actions that the simulator rejects [default: off]
    #[arg(long)]
    #[serde(default)]
    pub no_legality_filter: bool,
    /// Worker threads; 0 uses all cores [default: 0]
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Row label prefix [default: dataset file stem]
    #[arg(long)]
    pub label: Option<String>,
    /// Also write the markdown table here [default: none]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the metrics as CSV here [default: none]
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleArgs {
    /// JSON file with default values for any flag below; explicit flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Domain: blocksworld, game24 or cube2x2 [required]
    #[arg(long)]
    pub domain: Option<String>,
    /// Single instance, in any form accepted by `solve --instance`
    #[arg(long, allow_hyphen_values = true)]
    pub instance: Option<String>,
    /// Goal description for a blocksworld --instance given as text
    #[arg(long)]
    pub goal: Option<String>,
    /// Check every record of a dataset against the oracle instead
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Depth cap [default: domain cap]
    #[arg(long)]
    pub cap: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenDatasetArgs {
    /// JSON file with default values for any flag below; explicit flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Domain: blocksworld, game24 or cube2x2 [required]
    #[arg(long)]
    pub domain: Option<String>,
    /// Depth buckets as depth:count pairs, e.g. 1:20,2:20 [default: cube 1-4 x 20, blocksworld 2/4/6 x 20]
    #[arg(long)]
    pub buckets: Option<String>,
    /// Game of 24 instance count [default: 100]
    #[arg(long)]
    pub count: Option<usize>,
    /// Blocks per blocksworld instance [default: 5]
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Keep unsolvable game24 quadruples and record solvability [default: off]
    #[arg(long)]
    #[serde(default)]
    pub mixed: bool,
    /// Cube move set [default: full]
    #[arg(long, value_enum)]
    pub move_set: Option<MoveSetArg>,
    /// Generation seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InspectArgs {
    /// Archive JSON, heuristic file or dataset
    pub path: PathBuf,
    /// Domain, needed for heuristic files and datasets
    #[arg(long)]
    pub domain: Option<String>,
}

/// Fills unset fields of `$dst` from `$src`.
macro_rules! merge_under {
    ($dst:expr, $src:expr; $($field:ident),* $(,)?) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.take(); } )*
    };
}

impl EvolveArgs {
    pub fn merge_under(&mut self, mut cfg: Self) {
        merge_under!(self, cfg; domain, validation, b, generations, generator, algorithm, budget, depth_cap, world, retry_cap, seed, jobs, out, prompt_log);
    }
}

impl SolveArgs {
    pub fn merge_under(&mut self, mut cfg: Self) {
        merge_under!(self, cfg; domain, instance, index, goal, heuristic, algorithm, num_solutions, budget, depth_cap, world);
        self.no_legality_filter |= cfg.no_legality_filter;
    }
}

impl BenchArgs {
    pub fn merge_under(&mut self, mut cfg: Self) {
        merge_under!(self, cfg; domain, dataset, heuristic, algorithm, num_solutions, budget, depth_cap, world, jobs, label, out, csv);
        self.no_legality_filter |= cfg.no_legality_filter;
    }
}

impl OracleArgs {
    pub fn merge_under(&mut self, mut cfg: Self) {
        merge_under!(self, cfg; domain, instance, goal, dataset, cap);
    }
}

impl GenDatasetArgs {
    pub fn merge_under(&mut self, mut cfg: Self) {
        merge_under!(self, cfg; domain, buckets, count, blocks, move_set, seed, out);
        self.mixed |= cfg.mixed;
    }
}
