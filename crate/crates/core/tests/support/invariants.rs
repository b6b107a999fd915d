//! Seeded invariant suites shared by the property tests and the acceptance
//! harness. Each returns a one-line summary on success.

#![allow(dead_code)]

use std::collections::BTreeMap;

use autohd_core::domains::{BlocksState, BwGoal, CubeMove, CubeState, DomainId, Face, Game24State, MoveSet, Turn};
use autohd_core::dsl::{domain_bindings, parse_program, CompiledHeuristic};
use autohd_core::search::{search_with_trace, Algorithm, SearchConfig};
use autohd_core::task::{GroundTruth, Goal, PlanningTask, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BLOCK_NAMES: [&str; 8] = ["red", "blue", "orange", "yellow", "green", "purple", "white", "black"];

pub fn cube_from(moves: &[CubeMove]) -> CubeState {
    moves.iter().fold(CubeState::solved(), |s, &m| s.apply(m))
}

fn random_cube(rng: &mut ChaCha8Rng, len: usize) -> CubeState {
    let moves = MoveSet::Full.moves();
    let seq: Vec<CubeMove> = (0..len).map(|_| moves[rng.random_range(0..moves.len())]).collect();
    cube_from(&seq)
}

/// Quarter turns have order 4, two quarters make a half, clockwise and
/// counter-clockwise cancel, and every move keeps four stickers per color.
pub fn cube_group(seed: u64, states: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..states {
        let start = random_cube(&mut rng, 12);
        for face in Face::ALL {
            let q = CubeMove::new(face, Turn::Cw90);
            let mut s = start;
            for i in 1..=4 {
                s = s.apply(q);
                if (s == start) != (i == 4) {
                    return Err(format!("{face:?} quarter turn does not have order 4"));
                }
            }
            if start.apply(q).apply(q) != start.apply(CubeMove::new(face, Turn::Half)) {
                return Err(format!("{face:?} half turn differs from two quarter turns"));
            }
            if start.apply(q).apply(CubeMove::new(face, Turn::Ccw90)) != start {
                return Err(format!("{face:?} clockwise then counter-clockwise is not the identity"));
            }
        }
        for m in MoveSet::Full.moves() {
            let mut counts = BTreeMap::new();
            for &c in start.apply(m).facelets() {
                *counts.entry(c).or_insert(0usize) += 1;
            }
            if counts.len() != 6 || counts.values().any(|&n| n != 4) {
                return Err(format!("{m} breaks the color multiset: {counts:?}"));
            }
        }
    }
    Ok(format!("{states} random states x 6 faces x 18 moves"))
}

pub fn random_blocks(rng: &mut ChaCha8Rng) -> BlocksState {
    let n = rng.random_range(1..=BLOCK_NAMES.len());
    let mut names: Vec<String> = BLOCK_NAMES[..n].iter().map(|s| s.to_string()).collect();
    for i in (1..n).rev() {
        names.swap(i, rng.random_range(0..=i));
    }
    let holding = if n > 1 && rng.random_bool(0.3) { names.pop() } else { None };
    let mut stacks: Vec<Vec<String>> = Vec::new();
    for b in names {
        match stacks.last_mut() {
            Some(top) if rng.random_bool(0.6) => top.push(b),
            _ => stacks.push(vec![b]),
        }
    }
    BlocksState::new(stacks, holding).expect("distinct names")
}

/// Render-then-parse is the identity on states and on full goals.
pub fn blocks_round_trip(seed: u64, states: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..states {
        let s = random_blocks(&mut rng);
        let text = s.render();
        let back = BlocksState::parse(&text).map_err(|e| format!("{e}: {text}"))?;
        if back != s {
            return Err(format!("state changed across round trip: {text}"));
        }
        let goal = BwGoal::from_state(&s);
        let g = BwGoal::parse(&goal.render()).map_err(|e| format!("{e}: {}", goal.render()))?;
        if g != goal {
            return Err(format!("goal changed across round trip: {}", goal.render()));
        }
    }
    Ok(format!("{states} random states"))
}

/// Generates well-scoped, not necessarily well-typed, heuristic source.
pub struct ProgramGen {
    rng: ChaCha8Rng,
}

impl ProgramGen {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs[self.rng.random_range(0..xs.len())]
    }

    fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn program(&mut self, domain: DomainId, depth: usize) -> String {
        let mut scope: Vec<String> = domain_bindings(domain).iter().map(|s| s.to_string()).collect();
        self.expr(depth, &mut scope, domain)
    }

    fn expr(&mut self, depth: usize, scope: &mut Vec<String>, domain: DomainId) -> String {
        if depth == 0 || self.below(4) == 0 {
            return match self.below(3) {
                0 => self.pick(&["0", "1", "2.5", "24", "0.25", "100"]).to_string(),
                _ => scope[self.below(scope.len())].clone(),
            };
        }
        let d = depth - 1;
        match self.below(9) {
            0 => format!("-{}", self.atom(d, scope, domain)),
            1 | 2 => {
                let op = self.pick(&["+", "-", "*", "/", "==", "!=", "<", "<=", ">", ">=", "and", "or"]);
                format!("{} {op} {}", self.atom(d, scope, domain), self.atom(d, scope, domain))
            }
            3 => format!(
                "if {} then {} else {}",
                self.expr(d, scope, domain),
                self.expr(d, scope, domain),
                self.expr(d, scope, domain)
            ),
            4 => {
                let name = format!("v{}", scope.len());
                let bound = self.expr(d, scope, domain);
                scope.push(name.clone());
                let body = self.expr(d, scope, domain);
                scope.pop();
                format!("let {name} = {bound} in {body}")
            }
            5 => {
                let f = self.pick(&["map", "filter", "count"]);
                let name = format!("x{}", scope.len());
                let coll = self.expr(d, scope, domain);
                scope.push(name.clone());
                let body = self.expr(d, scope, domain);
                scope.pop();
                format!("{f}({name} in {coll}, {body})")
            }
            6 => {
                let f = self.pick(&["zip", "at", "min", "max"]);
                format!("{f}({}, {})", self.expr(d, scope, domain), self.expr(d, scope, domain))
            }
            _ => {
                let mut fs = vec!["sum", "len", "min", "max", "abs", "range"];
                fs.extend(match domain {
                    DomainId::Cube2x2 => ["faces", "uniform"].as_slice(),
                    DomainId::Blocksworld => ["block", "support", "height"].as_slice(),
                    DomainId::Game24 => ["results"].as_slice(),
                });
                let f = self.pick(&fs);
                format!("{f}({})", self.expr(d, scope, domain))
            }
        }
    }

    fn atom(&mut self, depth: usize, scope: &mut Vec<String>, domain: DomainId) -> String {
        format!("({})", self.expr(depth, scope, domain))
    }

    /// Character-level damage: deletions, duplications, stray tokens.
    pub fn mutate(&mut self, src: &str) -> String {
        let mut chars: Vec<char> = src.chars().collect();
        for _ in 0..1 + self.below(3) {
            if chars.is_empty() {
                break;
            }
            let i = self.below(chars.len());
            match self.below(3) {
                0 => {
                    chars.remove(i);
                }
                1 => chars.insert(i, chars[i]),
                _ => {
                    let junk = self.pick(&["(", ")", ",", "in", "#", "let", "..", "1e999", "@"]);
                    for (k, c) in junk.chars().enumerate() {
                        chars.insert(i + k, c);
                    }
                }
            }
        }
        chars.into_iter().collect()
    }
}

fn task(state: State, goal: Goal) -> PlanningTask {
    PlanningTask::new("fuzz", state, goal).expect("same domain")
}

/// A few representative (task, state) pairs per domain.
pub fn sample_views(domain: DomainId) -> Vec<(PlanningTask, State)> {
    match domain {
        DomainId::Cube2x2 => {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            [0, 2, 6]
                .iter()
                .map(|&n| {
                    let t = task(State::Cube2x2(random_cube(&mut rng, n)), Goal::Cube2x2);
                    let s = t.initial_state.clone();
                    (t, s)
                })
                .collect()
        }
        DomainId::Game24 => [vec![4, 6, 8, 8], vec![24], vec![1, 1]]
            .iter()
            .map(|n| {
                let t = task(State::Game24(Game24State::from_ints(n).unwrap()), Goal::Game24);
                let s = t.initial_state.clone();
                (t, s)
            })
            .collect(),
        DomainId::Blocksworld => {
            let init = BlocksState::new(vec![vec!["red".into(), "blue".into()], vec!["green".into()]], None).unwrap();
            let target = BlocksState::new(vec![vec!["blue".into(), "red".into(), "green".into()]], None).unwrap();
            let t = task(State::Blocksworld(init.clone()), Goal::Blocksworld(BwGoal::from_state(&target)));
            let held = init.apply(&init.actions()[0]).unwrap();
            vec![(t.clone(), State::Blocksworld(init)), (t, State::Blocksworld(held))]
        }
    }
}

/// Parses and evaluates `programs` generated programs (every fourth one
/// damaged). A panic anywhere is a failure; every rejection must be a
/// typed parse error or fault.
pub fn dsl_fuzz(seed: u64, programs: usize) -> Result<String, String> {
    let mut g = ProgramGen::new(seed);
    let views: Vec<Vec<(PlanningTask, State)>> = DomainId::ALL.iter().map(|&d| sample_views(d)).collect();
    let mut parsed = 0;
    let mut evaluations = 0;
    let mut faults: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..programs {
        let di = i % DomainId::ALL.len();
        let domain = DomainId::ALL[di];
        let clean = g.program(domain, 5);
        let src = if i % 4 == 3 { g.mutate(&clean) } else { clean };
        let run = std::panic::catch_unwind(|| match parse_program(&src, domain) {
            Err(e) => (Some(format!("parse:{:?}", e.kind)), Vec::new()),
            Ok(h) => (None, views[di].iter().map(|(t, s)| h.evaluate(&t.view(s))).collect()),
        });
        let (parse_error, results) = run.map_err(|_| format!("crash on {domain} program: {src}"))?;
        if let Some(kind) = parse_error {
            *faults.entry(kind).or_default() += 1;
            continue;
        }
        parsed += 1;
        for r in results {
            evaluations += 1;
            if let Err(f) = r {
                *faults.entry(format!("{:?}", f.kind)).or_default() += 1;
            }
        }
    }
    if parsed * 2 < programs {
        return Err(format!("only {parsed} of {programs} programs parsed; the generator is too weak"));
    }
    Ok(format!("{programs} programs, {parsed} parsed, {evaluations} evaluations, 0 crashes, failures by kind {faults:?}"))
}

fn popped(task: &PlanningTask, h: &CompiledHeuristic, budget: usize) -> (Vec<String>, usize) {
    let mut cfg = SearchConfig::for_task(task, Algorithm::GreedyBfs);
    cfg.expansion_budget = budget;
    let mut keys = Vec::new();
    let r = search_with_trace(task, &GroundTruth::for_task(task), h, &cfg, &mut |t| keys.push(t.state_key));
    (keys, r.stats.heuristic_faults)
}

pub const CUBE_HEURISTICS: [&str; 2] =
    ["6 - count(f in faces(state), uniform(f))", "sum(map(f in faces(state), count(x in f, x != at(f, 0))))"];
pub const G24_HEURISTIC: &str = "min(map(v in results(state), abs(target - v)))";

/// Greedy best-first pops the same states in the same order when every
/// heuristic value is doubled (fault-free runs only).
pub fn greedy_scaling(seed: u64, instances: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0;
    for i in 0..instances {
        let (t, src, domain) = if i % 3 == 2 {
            let nums: Vec<i64> = (0..4).map(|_| rng.random_range(1..14)).collect();
            (task(State::Game24(Game24State::from_ints(&nums).unwrap()), Goal::Game24), G24_HEURISTIC, DomainId::Game24)
        } else {
            let len = rng.random_range(1..8);
            (task(State::Cube2x2(random_cube(&mut rng, len)), Goal::Cube2x2), CUBE_HEURISTICS[i % 2], DomainId::Cube2x2)
        };
        let h1 = parse_program(src, domain).unwrap();
        let h2 = parse_program(&format!("2 * ({src})"), domain).unwrap();
        let (a, fa) = popped(&t, &h1, 300);
        let (b, fb) = popped(&t, &h2, 300);
        if fa + fb > 0 {
            continue;
        }
        compared += 1;
        if a != b {
            return Err(format!("pop order changed under doubling on {}", t.initial_state.render()));
        }
    }
    Ok(format!("{compared} fault-free runs with identical pop order"))
}
