use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use autohd_core::bench::dataset::parse_record;
use autohd_core::bench::{
    g24_expression, gen_dataset, load_dataset, metrics_to_csv, metrics_to_markdown, oracle_solve, run_bench, write_dataset,
    BenchConfig, DatasetError, DatasetSpec,
};
use autohd_core::domains::{BlocksState, BwGoal, CubeState, DomainId, Game24State, MoveSet};
use autohd_core::dsl::{Builtin, HeuristicProgram};
use autohd_core::evolution::{evolve_with_progress, Archive, EvolutionConfig, EvolutionError, Evaluator, StubGenerator};
use autohd_core::search::{search, Algorithm};
use autohd_core::task::{validate_plan, Goal, GroundTruth, PlanningTask, State, WorldModel};
use autohd_gateway::{GatewayError, LlmGenerator, LlmWorldModel};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::args::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Service(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Service(_) => 3,
        }
    }
}

impl From<GatewayError> for CliError {
    fn from(e: GatewayError) -> Self {
        match e {
            GatewayError::Config(_) => CliError::Config(e.to_string()),
            _ => CliError::Service(e.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Outcome of a command that ran to completion: success or "no plan found".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Unsolved,
}

type Result<T> = std::result::Result<T, CliError>;

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&PathBuf>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| config_err(format!("{}: {e}", p.display()))),
    }
}

fn echo<T: Serialize>(cmd: &str, args: &T, to_stderr: bool) {
    let line = format!("# autohd {cmd} config: {}", serde_json::to_string(args).expect("flags serialize"));
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn domain(d: &Option<String>) -> Result<DomainId> {
    d.as_deref().ok_or_else(|| config_err("--domain is required"))?.parse().map_err(config_err)
}

/// Parses the domain flag and rewrites it to the canonical name for the echo.
fn canonical_domain(d: &mut Option<String>) -> Result<DomainId> {
    let id = domain(d)?;
    *d = Some(id.name().to_string());
    Ok(id)
}

fn algorithm(a: AlgorithmArg) -> Algorithm {
    match a {
        AlgorithmArg::Astar => Algorithm::Astar,
        AlgorithmArg::Greedy => Algorithm::GreedyBfs,
    }
}

/// `builtin:<name>`, an archive JSON (its global best) or a heuristic file.
pub fn load_heuristic(spec: Option<&str>, domain: DomainId) -> Result<HeuristicProgram> {
    let spec = spec.map(str::to_string).unwrap_or_else(|| format!("builtin:{}", Builtin::for_domain(domain).name()));
    if let Some(name) = spec.strip_prefix("builtin:") {
        return HeuristicProgram::builtin(name, domain).map_err(config_err);
    }
    let text = read(Path::new(&spec))?;
    if let Ok(archive) = Archive::from_json(&text) {
        if archive.domain != domain {
            return Err(config_err(format!("archive {spec} was evolved for {}, not {domain}", archive.domain)));
        }
        return archive.best_program().ok_or_else(|| config_err(format!("archive {spec} has no usable best heuristic")));
    }
    HeuristicProgram::from_file(&text, domain).map_err(|e| config_err(format!("{spec}: {e}")))
}

fn parse_numbers<T: std::str::FromStr>(text: &str) -> Option<Vec<T>> {
    text.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().ok())
        .collect()
}

/// Resolves `--instance`: a dataset file, a single JSON record or a
/// domain-specific shorthand.
pub fn load_instance(domain: DomainId, instance: &str, goal: Option<&str>, index: usize) -> Result<PlanningTask> {
    let path = Path::new(instance);
    if path.is_file() {
        let tasks = load_dataset(path, domain)?;
        let n = tasks.len();
        return tasks.into_iter().nth(index).ok_or_else(|| config_err(format!("--index {index} out of range ({n} records)")));
    }
    if instance.trim_start().starts_with('{') {
        return Ok(parse_record(domain, instance, 1)?);
    }
    let bad = |what: &str| config_err(format!("--instance is not {what}: {instance:?}"));
    let (state, goal) = match domain {
        DomainId::Game24 => {
            let nums = parse_numbers::<i64>(instance).ok_or_else(|| bad("a list of integers"))?;
            (State::Game24(Game24State::from_ints(&nums).map_err(config_err)?), Goal::Game24)
        }
        DomainId::Cube2x2 => {
            let facelets = parse_numbers::<u8>(instance).ok_or_else(|| bad("24 facelet colors"))?;
            (State::Cube2x2(CubeState::from_slice(&facelets).map_err(config_err)?), Goal::Cube2x2)
        }
        DomainId::Blocksworld => {
            let goal = goal.ok_or_else(|| config_err("--goal is required for a blocksworld instance given as text"))?;
            let init = BlocksState::parse(instance).map_err(config_err)?;
            (State::Blocksworld(init), Goal::Blocksworld(BwGoal::parse(goal).map_err(config_err)?))
        }
    };
    PlanningTask::new("cli", state, goal).map_err(config_err)
}

fn world_model(world: Option<WorldArg>, domain: DomainId, legality_filter: bool) -> Result<Option<LlmWorldModel>> {
    if world != Some(WorldArg::Model) {
        return Ok(None);
    }
    if domain == DomainId::Cube2x2 {
        return Err(config_err("the cube domain runs on the ground-truth simulator only"));
    }
    let mut m = LlmWorldModel::new(autohd_gateway::from_env()?, domain)?;
    m.legality_filter = legality_filter;
    Ok(Some(m))
}

fn report_world(m: &Option<LlmWorldModel>) {
    if let Some(m) = m {
        let s = m.stats();
        println!(
            "world model: {} action calls, {} transition calls, {} re-prompts, {} illegal dropped, {} dead branches, {} service errors",
            s.action_calls, s.transition_calls, s.reprompts, s.dropped_illegal, s.dead_branches, s.service_errors
        );
    }
}

pub fn evolve(mut a: EvolveArgs) -> Result<Outcome> {
    a.merge_under(load_config(a.config.as_ref())?);
    a.b.get_or_insert(4);
    a.generations.get_or_insert(5);
    a.generator.get_or_insert(GeneratorArg::Stub);
    a.algorithm.get_or_insert(AlgorithmArg::Astar);
    a.world.get_or_insert(WorldArg::GroundTruth);
    a.retry_cap.get_or_insert(2);
    a.seed.get_or_insert(0);
    a.jobs.get_or_insert(0);
    a.out.get_or_insert_with(|| "archive.json".into());
    let d = canonical_domain(&mut a.domain)?;
    echo("evolve", &a, false);

    let validation = a.validation.as_ref().ok_or_else(|| config_err("--validation is required"))?;
    let tasks = load_dataset(validation, d)?;
    let mut bench = BenchConfig::new(algorithm(a.algorithm.unwrap()));
    bench.expansion_budget = a.budget;
    bench.depth_cap = a.depth_cap;
    bench.jobs = a.jobs.unwrap();
    let model = world_model(a.world, d, true)?;
    let mut evaluator = Evaluator::new(tasks, bench);
    evaluator.model = model.as_ref().map(|m| m as &dyn WorldModel);

    let mut config = EvolutionConfig::new(a.b.unwrap(), a.generations.unwrap(), a.seed.unwrap());
    config.retry_cap = a.retry_cap.unwrap();
    let mut progress = |g: &autohd_core::evolution::GenerationRecord| {
        println!(
            "generation {}: best {:.3} ({}), running best {:.3}",
            g.index, g.best.accuracy, g.best.id, g.running_best_accuracy
        );
    };
    let evolved = |e: EvolutionError| match e {
        EvolutionError::Precondition(_) => config_err(e),
        EvolutionError::Generator { .. } => CliError::Service(e.to_string()),
    };
    let archive = match a.generator.unwrap() {
        GeneratorArg::Stub => {
            let mut g = StubGenerator::new(a.seed.unwrap());
            let archive = evolve_with_progress(&mut g, &evaluator, config, &mut progress).map_err(evolved)?;
            if let Some(p) = &a.prompt_log {
                write(p, "[]\n")?;
            }
            archive
        }
        GeneratorArg::Llm => {
            let mut g = LlmGenerator::new(autohd_gateway::from_env()?);
            let result = evolve_with_progress(&mut g, &evaluator, config, &mut progress);
            if let Some(p) = &a.prompt_log {
                write(p, &serde_json::to_string_pretty(g.prompt_log()).expect("log serializes"))?;
            }
            result.map_err(evolved)?
        }
    };
    report_world(&model);
    let out = a.out.as_ref().unwrap();
    write(out, &archive.to_json())?;
    println!("global best {} with accuracy {:.3}", archive.global_best.id, archive.global_best.accuracy);
    println!("archive written to {}", out.display());
    Ok(Outcome::Ok)
}

pub fn solve(mut a: SolveArgs) -> Result<Outcome> {
    a.merge_under(load_config(a.config.as_ref())?);
    a.index.get_or_insert(0);
    a.algorithm.get_or_insert(AlgorithmArg::Astar);
    a.num_solutions.get_or_insert(1);
    a.world.get_or_insert(WorldArg::GroundTruth);
    let d = canonical_domain(&mut a.domain)?;
    echo("solve", &a, false);

    let instance = a.instance.as_deref().ok_or_else(|| config_err("--instance is required"))?;
    let task = load_instance(d, instance, a.goal.as_deref(), a.index.unwrap())?;
    let h = load_heuristic(a.heuristic.as_deref(), d)?.compile().map_err(config_err)?;
    let mut bench = BenchConfig::new(algorithm(a.algorithm.unwrap()));
    bench.expansion_budget = a.budget;
    bench.depth_cap = a.depth_cap;
    bench.num_solutions = a.num_solutions.unwrap();
    let cfg = bench.search_config(&task);

    let model = world_model(a.world, d, !a.no_legality_filter)?;
    let gt = GroundTruth::for_task(&task);
    let used: &dyn WorldModel = match &model {
        Some(m) => m,
        None => &gt,
    };
    let result = search(&task, used, &h, &cfg);
    println!("instance: {}", task.instance_id);
    println!("heuristic: {} ({})", h.program().id, h.program().description);
    println!(
        "status: {}, {} expansions, {} generated, {} heuristic faults",
        result.status, result.stats.expansions, result.stats.generations, result.stats.heuristic_faults
    );
    let mut valid = 0;
    for (i, plan) in result.plans.iter().enumerate() {
        let v = validate_plan(&task, plan, &gt);
        valid += usize::from(v.valid);
        let verdict = if v.valid { "valid".to_string() } else { format!("invalid: {}", v.reason) };
        println!("plan {} ({} steps, {verdict}):", i + 1, plan.len());
        for (k, step) in plan.describe().iter().enumerate() {
            println!("  {}. {step}", k + 1);
        }
    }
    report_world(&model);
    if valid == 0 {
        println!("no valid plan found");
        return Ok(Outcome::Unsolved);
    }
    Ok(Outcome::Ok)
}

pub fn bench(mut a: BenchArgs) -> Result<Outcome> {
    a.merge_under(load_config(a.config.as_ref())?);
    a.algorithm.get_or_insert(BenchAlgorithmArg::Astar);
    a.num_solutions.get_or_insert(1);
    a.world.get_or_insert(WorldArg::GroundTruth);
    a.jobs.get_or_insert(0);
    let d = canonical_domain(&mut a.domain)?;
    echo("bench", &a, false);

    let path = a.dataset.as_ref().ok_or_else(|| config_err("--dataset is required"))?;
    let tasks = load_dataset(path, d)?;
    let program = load_heuristic(a.heuristic.as_deref(), d)?;
    let h = program.compile().map_err(config_err)?;
    let model = world_model(a.world, d, !a.no_legality_filter)?;
    let label = a
        .label
        .clone()
        .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let algorithms: &[Algorithm] = match a.algorithm.unwrap() {
        BenchAlgorithmArg::Astar => &[Algorithm::Astar],
        BenchAlgorithmArg::Greedy => &[Algorithm::GreedyBfs],
        BenchAlgorithmArg::Both => &[Algorithm::GreedyBfs, Algorithm::Astar],
    };
    let mut rows = Vec::new();
    for &alg in algorithms {
        let mut cfg = BenchConfig::new(alg);
        cfg.expansion_budget = a.budget;
        cfg.depth_cap = a.depth_cap;
        cfg.num_solutions = a.num_solutions.unwrap();
        cfg.jobs = a.jobs.unwrap();
        let (metrics, _) = run_bench(&format!("{label}/{}", program.id), &tasks, &h, model.as_ref().map(|m| m as &dyn WorldModel), &cfg)?;
        rows.push(metrics);
    }
    let table = metrics_to_markdown(&rows);
    print!("{table}");
    report_world(&model);
    if let Some(p) = &a.out {
        write(p, &table)?;
    }
    if let Some(p) = &a.csv {
        write(p, &metrics_to_csv(&rows))?;
    }
    Ok(Outcome::Ok)
}

pub fn oracle(mut a: OracleArgs) -> Result<Outcome> {
    a.merge_under(load_config(a.config.as_ref())?);
    let d = canonical_domain(&mut a.domain)?;
    a.cap.get_or_insert(d.depth_cap());
    echo("oracle", &a, false);
    let cap = a.cap.unwrap();

    match (&a.instance, &a.dataset) {
        (Some(_), Some(_)) => Err(config_err("give either --instance or --dataset, not both")),
        (None, None) => Err(config_err("--instance or --dataset is required")),
        (Some(inst), None) => {
            let task = load_instance(d, inst, a.goal.as_deref(), 0)?;
            let r = oracle_solve(&task, cap);
            let Some(depth) = r.optimal_depth else {
                println!("no plan within {cap} steps");
                return Ok(Outcome::Unsolved);
            };
            println!("optimal depth: {depth}");
            for (k, step) in r.plan.expect("plan accompanies depth").describe().iter().enumerate() {
                println!("  {}. {step}", k + 1);
            }
            if let State::Game24(s) = &task.initial_state {
                if let Some(e) = g24_expression(s.numbers()) {
                    println!("expression: {e} = 24");
                }
            }
            Ok(Outcome::Ok)
        }
        (None, Some(path)) => {
            let tasks = load_dataset(path, d)?;
            let mut mismatches = 0;
            for t in &tasks {
                let got = oracle_solve(t, cap).optimal_depth;
                if got != t.optimal_depth {
                    mismatches += 1;
                    println!("{}: recorded {:?}, oracle {:?}", t.instance_id, t.optimal_depth, got);
                }
            }
            println!("{} records checked, {mismatches} mismatches", tasks.len());
            Ok(if mismatches == 0 { Outcome::Ok } else { Outcome::Unsolved })
        }
    }
}

fn parse_buckets(text: &str) -> Result<Vec<(u32, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (d, n) = pair.split_once(':').ok_or_else(|| config_err(format!("bucket {pair:?} is not depth:count")))?;
            let d = d.trim().parse().map_err(|_| config_err(format!("bad depth in {pair:?}")))?;
            let n = n.trim().parse().map_err(|_| config_err(format!("bad count in {pair:?}")))?;
            Ok((d, n))
        })
        .collect()
}

pub fn gen_dataset_cmd(mut a: GenDatasetArgs) -> Result<Outcome> {
    a.merge_under(load_config(a.config.as_ref())?);
    let d = canonical_domain(&mut a.domain)?;
    let mut spec = DatasetSpec::default_for(d);
    if let Some(b) = &a.buckets {
        spec.buckets = parse_buckets(b)?;
    }
    if let Some(c) = a.count {
        spec.count = c;
    }
    if let Some(b) = a.blocks {
        spec.blocks = b;
    }
    spec.mixed = a.mixed;
    if let Some(m) = a.move_set {
        spec.move_set = match m {
            MoveSetArg::Full => MoveSet::Full,
            MoveSetArg::Reduced => MoveSet::Reduced,
        };
    }
    a.seed.get_or_insert(0);
    echo("gen-dataset", &a, a.out.is_none());

    let tasks = gen_dataset(d, &spec, a.seed.unwrap())?;
    match &a.out {
        Some(p) => {
            let f = fs::File::create(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            write_dataset(std::io::BufWriter::new(f), &tasks)?;
            println!("{} records written to {}", tasks.len(), p.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_dataset(&mut lock, &tasks)?;
            lock.flush().map_err(config_err)?;
        }
    }
    Ok(Outcome::Ok)
}

pub fn inspect(a: InspectArgs) -> Result<Outcome> {
    let text = read(&a.path)?;
    if let Ok(archive) = Archive::from_json(&text) {
        println!("archive for {} (b = {}, {} generations after the first)", archive.domain, archive.config.b, archive.config.generations);
        println!("{archive}");
        let disq: usize = archive.generations.iter().flat_map(|g| &g.members).filter(|c| c.disqualified.is_some()).count();
        println!("{} lineage entries, {disq} disqualified members", archive.lineage.len());
        if let Some(p) = archive.best_program() {
            print!("{}", p.to_file());
        }
        return Ok(Outcome::Ok);
    }
    let domains: Vec<DomainId> = match &a.domain {
        Some(_) => vec![domain(&a.domain)?],
        None => DomainId::ALL.to_vec(),
    };
    if text.trim_start().starts_with('{') {
        for d in &domains {
            if let Ok(tasks) = autohd_core::bench::read_dataset(text.as_bytes(), *d) {
                let mut buckets: BTreeMap<String, usize> = BTreeMap::new();
                for t in &tasks {
                    let key = t.optimal_depth.map_or("unsolvable".to_string(), |x| x.to_string());
                    *buckets.entry(key).or_default() += 1;
                }
                println!("{d} dataset with {} records", tasks.len());
                for (depth, n) in buckets {
                    println!("  depth {depth}: {n}");
                }
                return Ok(Outcome::Ok);
            }
        }
        return Err(config_err(format!("{} is not a dataset for {}", a.path.display(), names(&domains))));
    }
    for d in &domains {
        if let Ok(p) = HeuristicProgram::from_file(&text, *d) {
            let h = p.compile().map_err(config_err)?;
            println!("{d} heuristic {}", p.id);
            if !p.description.is_empty() {
                println!("description: {}", p.description);
            }
            println!("{}", h.pretty_print());
            return Ok(Outcome::Ok);
        }
    }
    Err(config_err(format!("{} is not an archive, dataset or heuristic for {}", a.path.display(), names(&domains))))
}

fn names(ds: &[DomainId]) -> String {
    ds.iter().map(|d| d.name()).collect::<Vec<_>>().join("/")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buckets_parse() {
        assert_eq!(parse_buckets("1:20, 2:5").unwrap(), vec![(1, 20), (2, 5)]);
        assert!(parse_buckets("1-20").is_err());
    }

    #[test]
    fn shorthand_instances() {
        let t = load_instance(DomainId::Game24, "[1, 2, 3, 4]", None, 0).unwrap();
        assert_eq!(t.initial_state.render(), Game24State::from_ints(&[1, 2, 3, 4]).unwrap().render());
        let solved: Vec<String> = CubeState::solved().facelets().iter().map(|x| x.to_string()).collect();
        let t = load_instance(DomainId::Cube2x2, &solved.join(","), None, 0).unwrap();
        assert!(t.goal.is_satisfied(&t.initial_state));
        assert!(load_instance(DomainId::Blocksworld, "the red block is clear", None, 0).is_err());
    }

    #[test]
    fn builtin_is_the_default_heuristic() {
        let p = load_heuristic(None, DomainId::Cube2x2).unwrap();
        assert_eq!(p.source, Builtin::for_domain(DomainId::Cube2x2).name());
        assert!(load_heuristic(Some("builtin:nope"), DomainId::Cube2x2).is_err());
    }
}
