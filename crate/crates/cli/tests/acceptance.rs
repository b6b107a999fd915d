//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//! Tolerances are pinned in each check; the process exits nonzero if any
//! criterion fails.

#[path = "../../core/tests/support/invariants.rs"]
mod invariants;
#[path = "../../gateway/tests/support/conformance.rs"]
mod conformance;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::sync::Arc;
use std::time::{Duration, Instant};

use autohd_core::bench::{
    gen_dataset, load_dataset, metrics_from_csv, oracle_solve, run_bench, write_dataset, BenchConfig, DatasetSpec,
};
use autohd_core::domains::DomainId;
use autohd_core::dsl::{CompiledHeuristic, HeuristicProgram};
use autohd_core::evolution::{evolve, Archive, EvolutionConfig, Evaluator, StubGenerator};
use autohd_core::search::{search, Algorithm};
use autohd_core::task::{validate_plan, GroundTruth, PlanningTask};
use autohd_gateway::{network_calls, FixtureClient, LlmGenerator};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn builtin(name: &str, d: DomainId) -> CompiledHeuristic {
    HeuristicProgram::builtin(name, d).expect("builtin exists").compile().expect("builtin compiles")
}

fn zero(d: DomainId) -> CompiledHeuristic {
    HeuristicProgram::dsl(d, "zero", "0").expect("parses").compile().expect("compiles")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
}

fn cube_set() -> Vec<PlanningTask> {
    gen_dataset(DomainId::Cube2x2, &DatasetSpec::default_for(DomainId::Cube2x2), 101).expect("cube dataset")
}

fn blocks_set(per_bucket: usize, seed: u64) -> Vec<PlanningTask> {
    let spec = DatasetSpec {
        buckets: vec![(2, per_bucket), (4, per_bucket), (6, per_bucket)],
        ..DatasetSpec::default_for(DomainId::Blocksworld)
    };
    gen_dataset(DomainId::Blocksworld, &spec, seed).expect("blocksworld dataset")
}

/// Labels must agree with a fresh exhaustive search.
fn oracle_verified(tasks: &[PlanningTask]) -> Result<(), String> {
    for t in tasks {
        let cap = t.domain().depth_cap();
        let d = oracle_solve(t, cap).optimal_depth;
        ensure(d == t.optimal_depth, || format!("{}: label {:?}, oracle {d:?}", t.instance_id, t.optimal_depth))?;
    }
    Ok(())
}

fn cube_completeness() -> Check {
    let start = Instant::now();
    let tasks = cube_set();
    oracle_verified(&tasks)?;
    let mut per_depth = BTreeMap::new();
    for t in &tasks {
        *per_depth.entry(t.optimal_depth.unwrap()).or_insert(0) += 1;
    }
    ensure(per_depth == BTreeMap::from([(1, 20), (2, 20), (3, 20), (4, 20)]), || format!("buckets {per_depth:?}"))?;
    let cfg = BenchConfig { depth_cap: Some(11), ..BenchConfig::new(Algorithm::Astar) };
    let (m, _) = run_bench("c1", &tasks, &builtin("cube_nonuniform_faces", DomainId::Cube2x2), None, &cfg)
        .map_err(|e| e.to_string())?;
    ensure(m.accuracy == 1.0, || format!("accuracy {} (required 1.0)", m.accuracy))?;
    within(Duration::from_secs(30), start)?;
    Ok(format!("80/80 solved, {:.2}s", start.elapsed().as_secs_f64()))
}

fn optimality() -> Check {
    let start = Instant::now();
    let mut tasks = cube_set();
    let blocks = blocks_set(10, 202);
    oracle_verified(&blocks)?;
    tasks.extend(blocks);
    let mut mismatches = Vec::new();
    for t in &tasks {
        // h = 0 needs the whole layer below the goal, beyond the default budget.
        let cfg = BenchConfig { expansion_budget: Some(500_000), ..BenchConfig::new(Algorithm::Astar) };
        let h = zero(t.domain());
        let r = search(t, &GroundTruth::for_task(t), &h, &cfg.search_config(t));
        let len = r.plans.first().map(|p| p.len() as u32);
        if len != t.optimal_depth {
            mismatches.push(format!("{}: {len:?} vs {:?}", t.instance_id, t.optimal_depth));
        }
    }
    ensure(mismatches.is_empty(), || format!("{} mismatches: {}", mismatches.len(), mismatches.join("; ")))?;
    within(Duration::from_secs(120), start)?;
    Ok(format!("{} plans of optimal length, {:.2}s", tasks.len(), start.elapsed().as_secs_f64()))
}

fn game24() -> Check {
    let start = Instant::now();
    let tasks = gen_dataset(DomainId::Game24, &DatasetSpec::default_for(DomainId::Game24), 303).map_err(|e| e.to_string())?;
    ensure(tasks.len() == 100, || format!("{} instances", tasks.len()))?;
    oracle_verified(&tasks)?;
    let cfg = BenchConfig { expansion_budget: Some(200), ..BenchConfig::new(Algorithm::GreedyBfs) };
    let (m, _) =
        run_bench("c3", &tasks, &builtin("g24_min_expr_gap", DomainId::Game24), None, &cfg).map_err(|e| e.to_string())?;
    ensure(m.accuracy == 1.0, || format!("accuracy {} (required 1.0)", m.accuracy))?;
    within(Duration::from_secs(120), start)?;
    Ok(format!("100/100 solved, mean {:.1} expansions, {:.2}s", m.mean_expansions, start.elapsed().as_secs_f64()))
}

fn blocksworld() -> Check {
    let start = Instant::now();
    let tasks = blocks_set(20, 404);
    oracle_verified(&tasks)?;
    let (m, _) = run_bench(
        "c4",
        &tasks,
        &builtin("bw_misplaced_plus_distance", DomainId::Blocksworld),
        None,
        &BenchConfig::new(Algorithm::Astar),
    )
    .map_err(|e| e.to_string())?;
    ensure(m.accuracy >= 0.95, || format!("accuracy {} (required >= 0.95)", m.accuracy))?;
    ensure(m.per_bucket.get(&2) == Some(&1.0), || format!("2-step bucket {:?} (required 1.0)", m.per_bucket.get(&2)))?;
    within(Duration::from_secs(120), start)?;
    Ok(format!("accuracy {:.3}, buckets {:?}, {:.2}s", m.accuracy, m.per_bucket, start.elapsed().as_secs_f64()))
}

fn evolution() -> Check {
    let start = Instant::now();
    let spec = DatasetSpec { buckets: vec![(1, 3), (2, 3), (3, 2), (4, 2)], ..DatasetSpec::default_for(DomainId::Cube2x2) };
    let validation = gen_dataset(DomainId::Cube2x2, &spec, 505).map_err(|e| e.to_string())?;
    ensure(validation.len() == 10, || format!("{} validation instances", validation.len()))?;
    let run = || -> Result<Archive, String> {
        let evaluator = Evaluator::new(validation.clone(), BenchConfig::new(Algorithm::Astar));
        evolve(&mut StubGenerator::new(9), &evaluator, EvolutionConfig::new(4, 5, 9)).map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    ensure(a.generations.len() == 6, || format!("{} generation records", a.generations.len()))?;
    let running: Vec<f64> = a.generations.iter().map(|g| g.running_best_accuracy).collect();
    ensure(running.windows(2).all(|w| w[1] >= w[0]), || format!("running max decreased: {running:?}"))?;
    let gen0 = a.generations[0].best.accuracy;
    ensure(a.global_best.accuracy >= gen0, || format!("final {} below generation-0 best {gen0}", a.global_best.accuracy))?;
    ensure(a.to_json() == b.to_json(), || "two runs with the same seed differ".into())?;
    within(Duration::from_secs(180), start)?;
    Ok(format!("running max {running:?}, identical reruns, {:.2}s", start.elapsed().as_secs_f64()))
}

fn cli(args: &[&str], envs: &[(&str, &str)]) -> Result<Output, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_autohd"));
    cmd.args(args);
    for var in ["AUTOHD_FIXTURES", "AUTOHD_API_KEY", "AUTOHD_BASE_URL", "AUTOHD_MODEL", "AUTOHD_RECORD"] {
        cmd.env_remove(var);
    }
    cmd.envs(envs.iter().copied());
    let out = cmd.output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("autohd {} exited with {}: {}", args.join(" "), out.status, String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out)
}

fn ablation(dir: &Path) -> Check {
    let spec = DatasetSpec { buckets: (1..=4).map(|d| (d, 5)).collect(), ..DatasetSpec::default_for(DomainId::Cube2x2) };
    let tasks = gen_dataset(DomainId::Cube2x2, &spec, 606).map_err(|e| e.to_string())?;
    let data = dir.join("ablation.jsonl");
    let csv = dir.join("ablation.csv");
    write_dataset(std::fs::File::create(&data).map_err(|e| e.to_string())?, &tasks).map_err(|e| e.to_string())?;
    let out = cli(
        &["bench", "--domain", "cube2x2", "--dataset", path(&data), "--algorithm", "both", "--csv", path(&csv)],
        &[],
    )?;
    let table = String::from_utf8_lossy(&out.stdout);
    let rows = metrics_from_csv(&std::fs::read_to_string(&csv).map_err(|e| e.to_string())?)?;
    let algs: Vec<Algorithm> = rows.iter().map(|r| r.algorithm).collect();
    ensure(algs == [Algorithm::GreedyBfs, Algorithm::Astar], || format!("rows for {algs:?}"))?;
    ensure(rows.iter().all(|r| r.instances == tasks.len() && !r.per_bucket.is_empty()), || "a row is empty".into())?;
    ensure(table.lines().filter(|l| l.starts_with('|')).count() >= 4, || format!("table has too few rows:\n{table}"))?;

    // Independently replay every plan either algorithm emits.
    let h = builtin("cube_nonuniform_faces", DomainId::Cube2x2);
    let mut plans = 0;
    for alg in [Algorithm::GreedyBfs, Algorithm::Astar] {
        for t in &tasks {
            let gt = GroundTruth::for_task(t);
            let r = search(t, &gt, &h, &BenchConfig::new(alg).search_config(t));
            for p in &r.plans {
                plans += 1;
                let v = validate_plan(t, p, &gt);
                ensure(v.valid, || format!("{alg:?} on {}: {}", t.instance_id, v.reason))?;
            }
        }
    }
    let acc: Vec<String> = rows.iter().map(|r| format!("{:?} {:.3}", r.algorithm, r.accuracy)).collect();
    Ok(format!("{}; {plans} plans validated", acc.join(", ")))
}

fn fixture_dir() -> PathBuf {
    conformance::gateway_dir().join("tests/fixtures/evolve_cube")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn gateway_offline(dir: &Path) -> Check {
    const KEY: &str = "sk-acceptance-6d0c11f2e8";
    let fixtures = fixture_dir();
    let recorded = std::fs::read_to_string(fixtures.join("archive.json")).map_err(|e| e.to_string())?;

    // In process: the counter proves no request left the process.
    let before = network_calls();
    let client = Arc::new(FixtureClient::new(fixtures.join("responses")).map_err(|e| e.to_string())?);
    let mut generator = LlmGenerator::new(client);
    let validation = load_dataset(&fixtures.join("validation.jsonl"), DomainId::Cube2x2).map_err(|e| e.to_string())?;
    let evaluator = Evaluator::new(validation, BenchConfig::new(Algorithm::Astar));
    let archive = evolve(&mut generator, &evaluator, EvolutionConfig::new(4, 2, 7)).map_err(|e| e.to_string())?;
    ensure(network_calls() == before, || format!("{} network calls", network_calls() - before))?;
    ensure(archive.to_json() == recorded, || "in-process replay differs from archive.json".into())?;

    // Through the binary, with a live key present and an unreachable endpoint
    // that would fail the run if it were contacted.
    let out_path = dir.join("archive.json");
    let log_path = dir.join("prompts.json");
    let out = cli(
        &[
            "evolve", "--domain", "cube2x2", "--validation", path(&fixtures.join("validation.jsonl")), "--generator", "llm",
            "--b", "4", "--generations", "2", "--seed", "7", "--out", path(&out_path), "--prompt-log", path(&log_path),
        ],
        &[
            ("AUTOHD_FIXTURES", path(&fixtures.join("responses"))),
            ("AUTOHD_API_KEY", KEY),
            ("AUTOHD_BASE_URL", "http://127.0.0.1:9/v1"),
        ],
    )?;
    let written = std::fs::read_to_string(&out_path).map_err(|e| e.to_string())?;
    ensure(written == recorded, || "CLI replay differs from archive.json".into())?;

    conformance::proposal_goldens_match()?;
    let templates = conformance::templates_match_sources()?;

    let mut artifacts = vec![out.stdout, out.stderr, written.into_bytes(), archive.to_json().into_bytes()];
    artifacts.push(std::fs::read(&log_path).map_err(|e| e.to_string())?);
    for entry in std::fs::read_dir(fixtures.join("responses")).map_err(|e| e.to_string())? {
        artifacts.push(std::fs::read(entry.map_err(|e| e.to_string())?.path()).map_err(|e| e.to_string())?);
    }
    let leaks = artifacts.iter().filter(|a| a.windows(KEY.len()).any(|w| w == KEY.as_bytes())).count();
    ensure(leaks == 0, || format!("api key found in {leaks} artifacts"))?;
    Ok(format!("0 network calls, archive byte-identical, goldens match, {templates}, {} artifacts key-free", artifacts.len()))
}

fn invariant_suites() -> Check {
    let parts = [
        ("cube group", invariants::cube_group(71, 200)?),
        ("blocksworld round trip", invariants::blocks_round_trip(72, 1_000)?),
        ("dsl fuzz", invariants::dsl_fuzz(2024, 10_000)?),
        ("greedy x2 scaling", invariants::greedy_scaling(73, 60)?),
    ];
    Ok(parts.iter().map(|(n, s)| format!("{n}: {s}")).collect::<Vec<_>>().join(" | "))
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("1 cube completeness", Box::new(cube_completeness)),
        ("2 optimality under h=0", Box::new(optimality)),
        ("3 game of 24", Box::new(game24)),
        ("4 blocksworld reference", Box::new(blocksworld)),
        ("5 evolution pipeline", Box::new(evolution)),
        ("6 algorithm ablation", Box::new(|| ablation(scratch.path()))),
        ("7 invariant suites", Box::new(invariant_suites)),
        ("8 gateway offline conformance", Box::new(|| gateway_offline(scratch.path()))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
