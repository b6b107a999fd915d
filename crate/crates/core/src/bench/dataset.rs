//! JSON-lines datasets and seeded, oracle-checked instance generation.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::oracle::{g24_expression, oracle_solve};
use crate::domains::{scramble, BlocksState, BwGoal, CubeState, DomainError, DomainId, Game24State, MoveSet};
use crate::task::{Goal, PlanningTask, State};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("dataset is empty")]
    Empty,
    #[error("invalid generation request: {0}")]
    Spec(String),
    #[error("could not generate a depth-{depth} instance within {attempts} attempts")]
    Unreachable { depth: u32, attempts: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlocksworldRecord {
    pub id: String,
    pub init: String,
    pub goal: String,
    pub min_steps: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Game24Record {
    pub id: String,
    pub numbers: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solvable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeRecord {
    pub id: String,
    pub state: Vec<u8>,
    pub optimal_moves: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub move_set: Option<MoveSet>,
}

fn record_err(line: usize, e: impl std::fmt::Display) -> DatasetError {
    DatasetError::Record { line, message: e.to_string() }
}

/// Parses one JSON line into a task.
pub fn parse_record(domain: DomainId, text: &str, line: usize) -> Result<PlanningTask, DatasetError> {
    let err = |e: DomainError| record_err(line, e);
    match domain {
        DomainId::Blocksworld => {
            let r: BlocksworldRecord = serde_json::from_str(text).map_err(|e| record_err(line, e))?;
            let init = BlocksState::parse(&r.init).map_err(err)?;
            let goal = BwGoal::parse(&r.goal).map_err(err)?;
            Ok(PlanningTask::new(r.id, State::Blocksworld(init), Goal::Blocksworld(goal)).map_err(err)?.with_optimal_depth(r.min_steps))
        }
        DomainId::Game24 => {
            let r: Game24Record = serde_json::from_str(text).map_err(|e| record_err(line, e))?;
            let state = Game24State::from_ints(&r.numbers).map_err(err)?;
            let mut t = PlanningTask::new(r.id, State::Game24(state), Goal::Game24).map_err(err)?;
            if r.solvable != Some(false) {
                t.optimal_depth = Some(r.numbers.len() as u32 - 1);
            }
            Ok(t)
        }
        DomainId::Cube2x2 => {
            let r: CubeRecord = serde_json::from_str(text).map_err(|e| record_err(line, e))?;
            let state = CubeState::from_slice(&r.state).map_err(err)?;
            let mut t = PlanningTask::new(r.id, State::Cube2x2(state), Goal::Cube2x2).map_err(err)?.with_optimal_depth(r.optimal_moves);
            t.move_set = r.move_set;
            Ok(t)
        }
    }
}

/// Serializes a task in its domain's record format.
pub fn to_record(task: &PlanningTask) -> Result<String, DatasetError> {
    let json = match (&task.initial_state, &task.goal) {
        (State::Blocksworld(s), Goal::Blocksworld(g)) => serde_json::to_string(&BlocksworldRecord {
            id: task.instance_id.clone(),
            init: s.render(),
            goal: g.render(),
            min_steps: task.optimal_depth.unwrap_or(0),
        }),
        (State::Game24(s), _) => {
            let numbers = s
                .numbers()
                .iter()
                .map(|r| if r.is_integer() { Ok(*r.numer()) } else { Err(DatasetError::Spec("non-integer operand".into())) })
                .collect::<Result<Vec<i64>, _>>()?;
            let expression = g24_expression(s.numbers());
            serde_json::to_string(&Game24Record {
                id: task.instance_id.clone(),
                numbers,
                solvable: Some(expression.is_some()),
                expression,
            })
        }
        (State::Cube2x2(s), _) => serde_json::to_string(&CubeRecord {
            id: task.instance_id.clone(),
            state: s.facelets().to_vec(),
            optimal_moves: task.optimal_depth.unwrap_or(0),
            move_set: task.move_set,
        }),
        _ => return Err(DatasetError::Spec("state and goal belong to different domains".into())),
    };
    Ok(json.expect("records always serialize"))
}

pub fn read_dataset(reader: impl BufRead, domain: DomainId) -> Result<Vec<PlanningTask>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(domain, &line, i + 1)?);
    }
    if out.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(out)
}

pub fn load_dataset(path: &std::path::Path, domain: DomainId) -> Result<Vec<PlanningTask>, DatasetError> {
    let file = std::fs::File::open(path)?;
    read_dataset(std::io::BufReader::new(file), domain)
}

pub fn write_dataset(mut writer: impl Write, tasks: &[PlanningTask]) -> Result<(), DatasetError> {
    for t in tasks {
        writeln!(writer, "{}", to_record(t)?)?;
    }
    Ok(())
}

/// What to generate. Cube and Blocksworld use `buckets` (depth, count);
/// Game of 24 uses `count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    #[serde(default)]
    pub buckets: Vec<(u32, usize)>,
    #[serde(default)]
    pub count: usize,
    /// Blocks per Blocksworld instance.
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    /// Keep unsolvable Game of 24 quadruples.
    #[serde(default)]
    pub mixed: bool,
    #[serde(default)]
    pub move_set: MoveSet,
    /// Attempts per instance before giving up on a bucket.
    #[serde(default = "default_attempts")]
    pub max_attempts: usize,
}

fn default_blocks() -> usize {
    5
}

fn default_attempts() -> usize {
    2_000
}

impl DatasetSpec {
    pub fn default_for(domain: DomainId) -> Self {
        let base = Self {
            buckets: Vec::new(),
            count: 0,
            blocks: default_blocks(),
            mixed: false,
            move_set: MoveSet::Full,
            max_attempts: default_attempts(),
        };
        match domain {
            DomainId::Cube2x2 => Self { buckets: (1..=4).map(|d| (d, 20)).collect(), ..base },
            DomainId::Blocksworld => Self { buckets: vec![(2, 20), (4, 20), (6, 20)], ..base },
            DomainId::Game24 => Self { count: 100, ..base },
        }
    }
}

pub const BLOCK_NAMES: [&str; 12] =
    ["red", "blue", "orange", "yellow", "green", "purple", "white", "black", "pink", "brown", "gray", "cyan"];

pub fn gen_dataset(domain: DomainId, spec: &DatasetSpec, seed: u64) -> Result<Vec<PlanningTask>, DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    match domain {
        DomainId::Cube2x2 => {
            for &(depth, n) in &spec.buckets {
                if depth == 0 {
                    return Err(DatasetError::Spec("cube buckets must have depth >= 1".into()));
                }
                for i in 0..n {
                    out.push(gen_cube(depth, spec, &mut rng, format!("cube-d{depth}-{i:03}"))?);
                }
            }
        }
        DomainId::Blocksworld => {
            if spec.blocks == 0 || spec.blocks > BLOCK_NAMES.len() {
                return Err(DatasetError::Spec(format!("blocks must be in 1..={}", BLOCK_NAMES.len())));
            }
            for &(depth, n) in &spec.buckets {
                if depth == 0 || depth % 2 == 1 {
                    return Err(DatasetError::Spec(format!(
                        "blocksworld walk length must be even and positive, got {depth}"
                    )));
                }
                for i in 0..n {
                    out.push(gen_blocks(depth, spec, &mut rng, format!("bw-s{depth}-{i:03}"))?);
                }
            }
        }
        DomainId::Game24 => {
            let mut attempts = 0;
            while out.len() < spec.count {
                attempts += 1;
                if attempts > spec.max_attempts.saturating_mul(spec.count.max(1)) {
                    return Err(DatasetError::Unreachable { depth: 3, attempts });
                }
                let nums: Vec<i64> = (0..4).map(|_| rng.random_range(1..=13)).collect();
                let state = Game24State::from_ints(&nums).expect("four integers form a valid state");
                let solvable = g24_expression(state.numbers()).is_some();
                if !solvable && !spec.mixed {
                    continue;
                }
                let mut t =
                    PlanningTask::new(format!("g24-{:03}", out.len()), State::Game24(state), Goal::Game24).expect("same domain");
                if solvable {
                    t.optimal_depth = Some(3);
                }
                out.push(t);
            }
        }
    }
    Ok(out)
}

fn gen_cube(depth: u32, spec: &DatasetSpec, rng: &mut ChaCha8Rng, id: String) -> Result<PlanningTask, DatasetError> {
    for _ in 0..spec.max_attempts {
        let (state, _) = scramble(depth as usize, rng.random(), spec.move_set).expect("depth is positive");
        let mut t = PlanningTask::new(id.clone(), State::Cube2x2(state), Goal::Cube2x2).expect("same domain");
        t.move_set = Some(spec.move_set);
        if oracle_solve(&t, depth).optimal_depth == Some(depth) {
            return Ok(t.with_optimal_depth(depth));
        }
    }
    Err(DatasetError::Unreachable { depth, attempts: spec.max_attempts })
}

fn random_blocks(n: usize, rng: &mut ChaCha8Rng) -> BlocksState {
    let mut names: Vec<String> = BLOCK_NAMES[..n].iter().map(|s| s.to_string()).collect();
    names.shuffle(rng);
    let mut stacks: Vec<Vec<String>> = Vec::new();
    for name in names {
        // join an existing stack or open a new one with equal odds per option
        let pick = rng.random_range(0..=stacks.len());
        if pick == stacks.len() {
            stacks.push(vec![name]);
        } else {
            stacks[pick].push(name);
        }
    }
    BlocksState::new(stacks, None).expect("generated stacks are valid")
}

fn gen_blocks(depth: u32, spec: &DatasetSpec, rng: &mut ChaCha8Rng, id: String) -> Result<PlanningTask, DatasetError> {
    for _ in 0..spec.max_attempts {
        let init = random_blocks(spec.blocks, rng);
        let mut cur = init.clone();
        let mut last = None;
        for _ in 0..depth {
            let actions = cur.actions();
            // avoid undoing the previous step outright
            let choices: Vec<_> = actions.iter().filter(|a| Some(cur.apply(a).unwrap()) != last).collect();
            let pool = if choices.is_empty() { actions.iter().collect() } else { choices };
            let a = pool[rng.random_range(0..pool.len())];
            last = Some(cur.clone());
            cur = cur.apply(a).expect("actions are legal");
        }
        let full = BwGoal::from_state(&cur);
        let goal = BwGoal::new(full.required_on, Default::default(), None).expect("state-derived goals are acyclic");
        let t = PlanningTask::new(id.clone(), State::Blocksworld(init), Goal::Blocksworld(goal)).expect("same domain");
        if oracle_solve(&t, depth).optimal_depth == Some(depth) {
            return Ok(t.with_optimal_depth(depth));
        }
    }
    Err(DatasetError::Unreachable { depth, attempts: spec.max_attempts })
}
