//! Heuristic-guided best-first search: Greedy BFS (pop min h) and A*
//! (pop min g + h). Goals are detected when a successor is generated.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::domains::DomainId;
use crate::dsl::{CompiledHeuristic, HValue};
use crate::task::{score_successors, Action, PlanStep, PlanTrace, PlanningTask, State, WorldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    GreedyBfs,
    Astar,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GreedyBfs => "greedy_bfs",
            Algorithm::Astar => "astar",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "greedy_bfs" | "greedy" | "gbfs" => Ok(Algorithm::GreedyBfs),
            "astar" | "a*" => Ok(Algorithm::Astar),
            other => Err(format!("unknown search algorithm {other:?} (expected greedy or astar)")),
        }
    }
}

/// Order among frontier entries with equal priority.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Earliest generated first.
    #[default]
    Fifo,
    /// Most recently generated first.
    Lifo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub expansion_budget: usize,
    pub depth_cap: u32,
    pub num_solutions: usize,
    #[serde(default)]
    pub tie_break: TieBreak,
}

impl SearchConfig {
    pub fn for_domain(domain: DomainId, algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            expansion_budget: domain.default_expansion_budget(),
            depth_cap: domain.depth_cap(),
            num_solutions: 1,
            tie_break: TieBreak::Fifo,
        }
    }

    /// Domain defaults with the depth cap tightened to twice the known optimum.
    pub fn for_task(task: &PlanningTask, algorithm: Algorithm) -> Self {
        let mut cfg = Self::for_domain(task.domain(), algorithm);
        if let Some(opt) = task.optimal_depth {
            cfg.depth_cap = cfg.depth_cap.min((2 * opt).max(1));
        }
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Solved,
    BudgetExhausted,
    FrontierEmpty,
    DepthCapped,
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStatus::Solved => "solved",
            SearchStatus::BudgetExhausted => "budget_exhausted",
            SearchStatus::FrontierEmpty => "frontier_empty",
            SearchStatus::DepthCapped => "depth_capped",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expansions: usize,
    pub generations: usize,
    pub duplicate_hits: usize,
    pub heuristic_faults: usize,
    pub dead_branches: usize,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub plans: Vec<PlanTrace>,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn solved(&self) -> bool {
        self.status == SearchStatus::Solved
    }
}

/// One line of the optional expansion log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub state_key: String,
    pub g: u32,
    pub h: HValue,
    pub f: HValue,
    pub action_in: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub state: State,
    pub g: u32,
    pub h: HValue,
    pub parent: Option<usize>,
    pub action_in: Option<Action>,
}

impl SearchNode {
    pub fn f(&self) -> HValue {
        f64::from(self.g) + self.h
    }
}

/// Walks the parent chain of `arena[idx]` back to the root.
pub fn reconstruct(arena: &[SearchNode], idx: usize) -> PlanTrace {
    let mut steps = Vec::new();
    let mut cur = idx;
    while let Some(parent) = arena[cur].parent {
        let node = &arena[cur];
        steps.push(PlanStep {
            action: node.action_in.clone().expect("non-root nodes record their action"),
            state: node.state.clone(),
        });
        cur = parent;
    }
    steps.reverse();
    PlanTrace { origin: arena[cur].state.clone(), steps }
}

struct Entry {
    priority: HValue,
    seq: u64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // BinaryHeap is a max-heap: invert so the smallest priority pops first,
    // then the smallest sequence number.
    fn cmp(&self, other: &Self) -> Ordering {
        other.priority.total_cmp(&self.priority).then_with(|| other.seq.cmp(&self.seq))
    }
}

fn evaluate(task: &PlanningTask, state: &State, h: &CompiledHeuristic, faults: &mut usize) -> HValue {
    match h.evaluate(&task.view(state)) {
        Ok(v) => v,
        Err(_) => {
            *faults += 1;
            HValue::INFINITY
        }
    }
}

pub fn greedy_bfs(task: &PlanningTask, model: &dyn WorldModel, h: &CompiledHeuristic, cfg: &SearchConfig) -> SearchResult {
    let cfg = SearchConfig { algorithm: Algorithm::GreedyBfs, ..*cfg };
    search_with_trace(task, model, h, &cfg, &mut |_| {})
}

pub fn astar(task: &PlanningTask, model: &dyn WorldModel, h: &CompiledHeuristic, cfg: &SearchConfig) -> SearchResult {
    let cfg = SearchConfig { algorithm: Algorithm::Astar, ..*cfg };
    search_with_trace(task, model, h, &cfg, &mut |_| {})
}

/// Runs the algorithm named in `cfg`.
pub fn search(task: &PlanningTask, model: &dyn WorldModel, h: &CompiledHeuristic, cfg: &SearchConfig) -> SearchResult {
    search_with_trace(task, model, h, cfg, &mut |_| {})
}

/// Like [`search`], calling `sink` once per expansion.
pub fn search_with_trace(
    task: &PlanningTask,
    model: &dyn WorldModel,
    h: &CompiledHeuristic,
    cfg: &SearchConfig,
    sink: &mut dyn FnMut(TraceRecord),
) -> SearchResult {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let finish = |status, plans, mut stats: SearchStats| {
        stats.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        SearchResult { status, plans, stats }
    };

    if task.goal.is_satisfied(&task.initial_state) {
        return finish(SearchStatus::Solved, vec![PlanTrace::empty(task.initial_state.clone())], stats);
    }

    let astar = cfg.algorithm == Algorithm::Astar;
    let want = cfg.num_solutions.max(1);
    let root_h = evaluate(task, &task.initial_state, h, &mut stats.heuristic_faults);
    let mut arena = vec![SearchNode { state: task.initial_state.clone(), g: 0, h: root_h, parent: None, action_in: None }];
    let root_key = task.initial_state.key();
    let mut visited: HashSet<String> = HashSet::new();
    let mut best_g: HashMap<String, u32> = HashMap::new();
    if astar {
        best_g.insert(root_key, 0);
    } else {
        visited.insert(root_key);
    }

    let mut seq: u64 = 0;
    let mut next_seq = |tie: TieBreak| {
        seq += 1;
        match tie {
            TieBreak::Fifo => seq,
            TieBreak::Lifo => u64::MAX - seq,
        }
    };
    let mut frontier = BinaryHeap::new();
    frontier.push(Entry { priority: if astar { arena[0].f() } else { root_h }, seq: next_seq(cfg.tie_break), node: 0 });

    let mut plans: Vec<PlanTrace> = Vec::new();
    let mut capped = false;

    while let Some(entry) = frontier.pop() {
        let idx = entry.node;
        if astar {
            let key = arena[idx].state.key();
            if best_g.get(&key).is_some_and(|&g| g < arena[idx].g) {
                continue; // stale entry superseded by a shorter path
            }
        }
        if arena[idx].g >= cfg.depth_cap {
            // only a cut if the node actually had children to explore
            capped = capped || !model.actions(&arena[idx].state).is_empty();
            continue;
        }
        if stats.expansions >= cfg.expansion_budget {
            let status = if plans.is_empty() { SearchStatus::BudgetExhausted } else { SearchStatus::Solved };
            return finish(status, plans, stats);
        }
        stats.expansions += 1;
        let node = &arena[idx];
        sink(TraceRecord {
            iteration: stats.expansions,
            state_key: node.state.key(),
            g: node.g,
            h: node.h,
            f: node.f(),
            action_in: node.action_in.as_ref().map(|a| a.to_string()),
        });

        let scored = score_successors(task, &node.state, model, h);
        stats.heuristic_faults += scored.faults;
        stats.dead_branches += scored.dead_branches;
        let g = node.g + 1;
        for succ in scored.successors {
            stats.generations += 1;
            let child = SearchNode { state: succ.state, g, h: succ.value, parent: Some(idx), action_in: Some(succ.action) };
            if task.goal.is_satisfied(&child.state) {
                arena.push(child);
                let plan = reconstruct(&arena, arena.len() - 1);
                if !plans.contains(&plan) {
                    plans.push(plan);
                }
                if plans.len() >= want {
                    return finish(SearchStatus::Solved, plans, stats);
                }
                continue;
            }
            let key = child.state.key();
            if astar {
                if best_g.get(&key).is_some_and(|&old| old <= g) {
                    stats.duplicate_hits += 1;
                    continue;
                }
                best_g.insert(key, g);
            } else if !visited.insert(key) {
                stats.duplicate_hits += 1;
                continue;
            }
            let priority = if astar { child.f() } else { child.h };
            arena.push(child);
            frontier.push(Entry { priority, seq: next_seq(cfg.tie_break), node: arena.len() - 1 });
        }
    }

    let status = if !plans.is_empty() {
        SearchStatus::Solved
    } else if capped {
        SearchStatus::DepthCapped
    } else {
        SearchStatus::FrontierEmpty
    };
    finish(status, plans, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{scramble, BlocksState, BwGoal, CubeState, Game24State, MoveSet};
    use crate::dsl::{builtin, parse_program};
    use crate::task::{validate_plan, Goal, GroundTruth};

    fn g24(nums: &[i64]) -> PlanningTask {
        PlanningTask::new("g", State::Game24(Game24State::from_ints(nums).unwrap()), Goal::Game24).unwrap()
    }

    fn cube_task(depth: usize, seed: u64) -> PlanningTask {
        let (s, _) = scramble(depth, seed, MoveSet::Full).unwrap();
        PlanningTask::new("c", State::Cube2x2(s), Goal::Cube2x2).unwrap()
    }

    #[test]
    fn goal_start_is_solved_without_expansion() {
        let t = g24(&[24]);
        let h = builtin("g24_min_expr_gap", DomainId::Game24).unwrap();
        let r = greedy_bfs(&t, &GroundTruth::default(), &h, &SearchConfig::for_domain(DomainId::Game24, Algorithm::GreedyBfs));
        assert_eq!(r.status, SearchStatus::Solved);
        assert!(r.plans[0].is_empty());
        assert_eq!(r.stats.expansions, 0);
    }

    #[test]
    fn four_times_six() {
        let t = g24(&[4, 6]);
        let h = builtin("g24_min_expr_gap", DomainId::Game24).unwrap();
        let mut cfg = SearchConfig::for_domain(DomainId::Game24, Algorithm::GreedyBfs);
        cfg.expansion_budget = 10;
        for r in [greedy_bfs(&t, &GroundTruth::default(), &h, &cfg), astar(&t, &GroundTruth::default(), &h, &cfg)] {
            assert_eq!(r.status, SearchStatus::Solved);
            assert!(r.stats.expansions <= 1);
            assert_eq!(r.plans[0].describe(), vec!["4 * 6 = 24".to_string()]);
        }
    }

    #[test]
    fn cube_depth_one_both_algorithms() {
        let h = builtin("cube_nonuniform_faces", DomainId::Cube2x2).unwrap();
        for seed in 0..10 {
            let t = cube_task(1, seed);
            for alg in [Algorithm::GreedyBfs, Algorithm::Astar] {
                let r = search(&t, &GroundTruth::default(), &h, &SearchConfig::for_domain(DomainId::Cube2x2, alg));
                assert_eq!(r.status, SearchStatus::Solved);
                assert_eq!(r.plans[0].len(), 1);
                assert!(r.stats.expansions <= 1);
            }
        }
    }

    #[test]
    fn zero_budget_exhausts() {
        let h = builtin("zero", DomainId::Cube2x2).unwrap();
        let mut cfg = SearchConfig::for_domain(DomainId::Cube2x2, Algorithm::Astar);
        cfg.expansion_budget = 0;
        let r = astar(&cube_task(2, 3), &GroundTruth::default(), &h, &cfg);
        assert_eq!(r.status, SearchStatus::BudgetExhausted);
        assert!(r.plans.is_empty());
    }

    #[test]
    fn depth_cap_reported() {
        let h = builtin("zero", DomainId::Cube2x2).unwrap();
        let mut cfg = SearchConfig::for_domain(DomainId::Cube2x2, Algorithm::Astar);
        cfg.depth_cap = 1;
        cfg.expansion_budget = 100_000;
        let r = astar(&cube_task(3, 11), &GroundTruth::new(MoveSet::Reduced), &h, &cfg);
        // a 3-move scramble cannot be solved inside a cap of 1
        assert_eq!(r.status, SearchStatus::DepthCapped);
    }

    #[test]
    fn game24_unsolvable_empties_frontier() {
        let h = builtin("g24_min_expr_gap", DomainId::Game24).unwrap();
        let r = greedy_bfs(&g24(&[1, 1, 1, 1]), &GroundTruth::default(), &h, &SearchConfig::for_domain(DomainId::Game24, Algorithm::GreedyBfs));
        assert_eq!(r.status, SearchStatus::FrontierEmpty);
    }

    #[test]
    fn multi_solution_distinct_valid_plans() {
        let t = g24(&[1, 2, 3, 4]);
        let h = builtin("g24_min_expr_gap", DomainId::Game24).unwrap();
        let mut cfg = SearchConfig::for_domain(DomainId::Game24, Algorithm::GreedyBfs);
        cfg.num_solutions = 5;
        let r = greedy_bfs(&t, &GroundTruth::default(), &h, &cfg);
        assert_eq!(r.status, SearchStatus::Solved);
        assert_eq!(r.plans.len(), 5);
        for (i, p) in r.plans.iter().enumerate() {
            assert!(validate_plan(&t, p, &GroundTruth::default()).valid);
            assert!(r.plans[..i].iter().all(|q| q != p));
        }
    }

    #[test]
    fn blocksworld_two_step() {
        let init = BlocksState::parse(
            "the red block is clear, the yellow block is clear, the hand is empty, the red block is on top of the blue block, \
             the yellow block is on top of the orange block, the blue block is on the table, the orange block is on the table",
        )
        .unwrap();
        let goal = BwGoal::parse("the orange block is on top of the red block").unwrap();
        let t = PlanningTask::new("bw", State::Blocksworld(init), Goal::Blocksworld(goal)).unwrap();
        let h = builtin("bw_misplaced_plus_distance", DomainId::Blocksworld).unwrap();
        let r = astar(&t, &GroundTruth::default(), &h, &SearchConfig::for_domain(DomainId::Blocksworld, Algorithm::Astar));
        assert!(r.solved());
        assert!(r.plans[0].len() <= 4);
        assert!(validate_plan(&t, &r.plans[0], &GroundTruth::default()).valid);
    }

    #[test]
    fn faulting_heuristic_is_counted_not_fatal() {
        let h = parse_program("1 / (len(state) - 24)", DomainId::Cube2x2).unwrap();
        let r = greedy_bfs(&cube_task(1, 5), &GroundTruth::default(), &h, &SearchConfig::for_domain(DomainId::Cube2x2, Algorithm::GreedyBfs));
        assert!(r.solved());
        assert!(r.stats.heuristic_faults > 0);
    }

    #[test]
    fn reconstruct_root_and_chain() {
        let s = State::Cube2x2(CubeState::solved());
        let arena = vec![SearchNode { state: s.clone(), g: 0, h: 0.0, parent: None, action_in: None }];
        assert!(reconstruct(&arena, 0).is_empty());
        let gt = GroundTruth::default();
        let mut arena = arena;
        for i in 0..3 {
            let a = gt.actions(&arena[i].state)[i].clone();
            let next = gt.transition(&arena[i].state, &a).unwrap();
            arena.push(SearchNode { state: next, g: i as u32 + 1, h: 0.0, parent: Some(i), action_in: Some(a) });
        }
        let tr = reconstruct(&arena, 3);
        assert_eq!(tr.len(), 3);
        assert_eq!(tr.final_state(), &arena[3].state);
    }

    #[test]
    fn task_depth_cap_uses_twice_optimum() {
        let t = cube_task(2, 1).with_optimal_depth(2);
        assert_eq!(SearchConfig::for_task(&t, Algorithm::Astar).depth_cap, 4);
        let t = cube_task(2, 1).with_optimal_depth(9);
        assert_eq!(SearchConfig::for_task(&t, Algorithm::Astar).depth_cap, 11);
    }
}
