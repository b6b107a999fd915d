//! Browser entry points. Each export takes plain strings and returns a JSON
//! document; errors come back as `{"error": "..."}` rather than exceptions,
//! so the page needs no error plumbing.

use autohd_core::domains::{CubeMove, CubeState, DomainId, Game24State};
use autohd_core::dsl::{Builtin, HeuristicProgram};
use autohd_core::bench::g24_expression;
use autohd_core::search::{search, Algorithm, SearchConfig};
use autohd_core::task::{validate_plan, Goal, GroundTruth, PlanningTask, State};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

#[derive(Debug, Serialize)]
struct SolveReport {
    status: String,
    expansions: usize,
    generated: usize,
    heuristic: String,
    plans: Vec<Vec<String>>,
    valid: Vec<bool>,
    /// Facelet colors after each step of the first plan, cube only.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    frames: Vec<Vec<u8>>,
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("reports serialize"),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse_algorithm(name: &str) -> Result<Algorithm, String> {
    match name.trim() {
        "" | "astar" => Ok(Algorithm::Astar),
        "greedy" => Ok(Algorithm::GreedyBfs),
        other => Err(format!("unknown algorithm {other:?}")),
    }
}

/// An empty source selects the domain's builtin heuristic.
fn heuristic(domain: DomainId, source: &str) -> Result<HeuristicProgram, String> {
    if source.trim().is_empty() {
        HeuristicProgram::builtin(Builtin::for_domain(domain).name(), domain)
    } else {
        HeuristicProgram::dsl(domain, "", source.trim()).map_err(|e| e.to_string())
    }
}

/// Applies a move sequence such as `R U' F2` to the solved cube.
pub fn scrambled_cube(moves: &str) -> Result<CubeState, String> {
    moves.split_whitespace().try_fold(CubeState::solved(), |s, m| {
        CubeMove::parse(m).map(|mv| s.apply(mv)).ok_or_else(|| format!("bad move {m:?}"))
    })
}

fn run(task: PlanningTask, source: &str, algorithm: &str, num_solutions: usize) -> Result<SolveReport, String> {
    let program = heuristic(task.domain(), source)?;
    let h = program.compile().map_err(|e| e.to_string())?;
    let mut cfg = SearchConfig::for_task(&task, parse_algorithm(algorithm)?);
    cfg.num_solutions = num_solutions.clamp(1, 20);
    let gt = GroundTruth::for_task(&task);
    let result = search(&task, &gt, &h, &cfg);
    let frames = match result.plans.first() {
        Some(p) => std::iter::once(&p.origin)
            .chain(p.steps.iter().map(|s| &s.state))
            .filter_map(|s| match s {
                State::Cube2x2(c) => Some(c.facelets().to_vec()),
                _ => None,
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(SolveReport {
        status: result.status.to_string(),
        expansions: result.stats.expansions,
        generated: result.stats.generations,
        heuristic: program.source.clone(),
        valid: result.plans.iter().map(|p| validate_plan(&task, p, &gt).valid).collect(),
        plans: result.plans.iter().map(|p| p.describe()).collect(),
        frames,
    })
}

pub fn solve_cube_json(moves: &str, source: &str, algorithm: &str) -> String {
    to_json(scrambled_cube(moves).and_then(|s| {
        let task = PlanningTask::new("web", State::Cube2x2(s), Goal::Cube2x2).map_err(|e| e.to_string())?;
        run(task, source, algorithm, 1)
    }))
}

pub fn solve_game24_json(numbers: &str, source: &str, algorithm: &str, num_solutions: usize) -> String {
    let parsed: Result<Vec<i64>, String> = numbers
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("{s:?} is not an integer")))
        .collect();
    let result = parsed.and_then(|nums| {
        let state = Game24State::from_ints(&nums).map_err(|e| e.to_string())?;
        let expression = g24_expression(state.numbers());
        let task = PlanningTask::new("web", State::Game24(state), Goal::Game24).map_err(|e| e.to_string())?;
        let report = run(task, source, algorithm, num_solutions)?;
        let mut v = serde_json::to_value(report).expect("reports serialize");
        v["expression"] = json!(expression);
        Ok(v)
    });
    to_json(result)
}

/// Parses `source` for `domain` and, when `instance` is given, evaluates it
/// there: cube instances are move sequences, Game of 24 instances are
/// numbers.
pub fn evaluate_heuristic_json(domain: &str, source: &str, instance: &str) -> String {
    let result = (|| {
        let d: DomainId = domain.parse().map_err(|e: autohd_core::domains::DomainError| e.to_string())?;
        let program = heuristic(d, source)?;
        let h = program.compile().map_err(|e| e.to_string())?;
        let (state, goal) = match d {
            DomainId::Cube2x2 => (State::Cube2x2(scrambled_cube(instance)?), Goal::Cube2x2),
            DomainId::Game24 => {
                let nums: Vec<i64> = instance
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|_| format!("{s:?} is not an integer")))
                    .collect::<Result<_, _>>()?;
                (State::Game24(Game24State::from_ints(&nums).map_err(|e| e.to_string())?), Goal::Game24)
            }
            DomainId::Blocksworld => return Err("the demo evaluates cube and Game of 24 heuristics".to_string()),
        };
        let task = PlanningTask::new("web", state.clone(), goal).map_err(|e| e.to_string())?;
        let value = h.evaluate(&task.view(&state));
        Ok(json!({
            "id": program.id,
            "pretty": h.pretty_print(),
            "value": value.as_ref().ok(),
            "fault": value.err().map(|f| f.to_string()),
        }))
    })();
    to_json(result)
}

#[wasm_bindgen]
pub fn solve_cube(moves: &str, heuristic: &str, algorithm: &str) -> String {
    solve_cube_json(moves, heuristic, algorithm)
}

#[wasm_bindgen]
pub fn solve_game24(numbers: &str, heuristic: &str, algorithm: &str, num_solutions: usize) -> String {
    solve_game24_json(numbers, heuristic, algorithm, num_solutions)
}

#[wasm_bindgen]
pub fn evaluate_heuristic(domain: &str, heuristic: &str, instance: &str) -> String {
    evaluate_heuristic_json(domain, heuristic, instance)
}
