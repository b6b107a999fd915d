//! Exact brute-force solvers used to label datasets and check search output.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::domains::game24::{fmt_rational, TARGET};
use crate::domains::Op;
use crate::task::{Action, GroundTruth, PlanStep, PlanTrace, PlanningTask, State, WorldModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Minimal plan length, or `None` when no plan exists within the cap.
    pub optimal_depth: Option<u32>,
    pub plan: Option<PlanTrace>,
}

/// Iterative deepening DFS. Within one iteration a state is re-entered only
/// when reached at a strictly smaller depth than before.
pub fn oracle_solve(task: &PlanningTask, cap: u32) -> OracleResult {
    let gt = GroundTruth::for_task(task);
    let origin = task.initial_state.clone();
    for limit in 0..=cap {
        let mut best: HashMap<String, u32> = HashMap::new();
        let mut path: Vec<(Action, State)> = Vec::new();
        if dfs(task, &gt, &origin, 0, limit, &mut best, &mut path) {
            let steps = path.into_iter().map(|(action, state)| PlanStep { action, state }).collect();
            return OracleResult { optimal_depth: Some(limit), plan: Some(PlanTrace { origin, steps }) };
        }
    }
    OracleResult { optimal_depth: None, plan: None }
}

fn dfs(
    task: &PlanningTask,
    gt: &GroundTruth,
    state: &State,
    depth: u32,
    limit: u32,
    best: &mut HashMap<String, u32>,
    path: &mut Vec<(Action, State)>,
) -> bool {
    if task.goal.is_satisfied(state) {
        return true;
    }
    if depth == limit {
        return false;
    }
    let key = state.key();
    if best.get(&key).is_some_and(|&d| d <= depth) {
        return false;
    }
    best.insert(key, depth);
    for action in gt.actions(state) {
        let Some(next) = gt.transition(state, &action) else { continue };
        path.push((action, next.clone()));
        if dfs(task, gt, &next, depth + 1, limit, best, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// Independent Game of 24 check: enumerates expression trees over all the
/// numbers and returns one that evaluates to 24.
pub fn g24_expression(numbers: &[Rational64]) -> Option<String> {
    let items: Vec<(Rational64, String)> = numbers.iter().map(|n| (*n, fmt_rational(n))).collect();
    search_expr(items)
}

fn search_expr(items: Vec<(Rational64, String)>) -> Option<String> {
    if items.len() == 1 {
        return (items[0].0 == Rational64::from_integer(TARGET)).then(|| items[0].1.clone());
    }
    for i in 0..items.len() {
        for j in 0..items.len() {
            if i == j {
                continue;
            }
            let (a, ea) = &items[i];
            let (b, eb) = &items[j];
            for op in [Op::Add, Op::Sub, Op::Mul, Op::Div] {
                let Some(v) = op.eval(*a, *b) else { continue };
                let mut rest: Vec<(Rational64, String)> =
                    items.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, x)| x.clone()).collect();
                rest.push((v, format!("({ea} {} {eb})", op.symbol())));
                if let Some(e) = search_expr(rest) {
                    return Some(e);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{scramble, BlocksState, BwGoal, CubeState, Game24State, MoveSet};
    use crate::task::{validate_plan, Goal};

    fn ints(v: &[i64]) -> Vec<Rational64> {
        v.iter().map(|&x| Rational64::from_integer(x)).collect()
    }

    #[test]
    fn solved_cube_is_depth_zero() {
        let t = PlanningTask::new("c", State::Cube2x2(CubeState::solved()), Goal::Cube2x2).unwrap();
        assert_eq!(oracle_solve(&t, 3).optimal_depth, Some(0));
    }

    #[test]
    fn game24_depth_three_and_expression() {
        let t = PlanningTask::new("g", State::Game24(Game24State::from_ints(&[4, 4, 6, 8]).unwrap()), Goal::Game24).unwrap();
        let r = oracle_solve(&t, 3);
        assert_eq!(r.optimal_depth, Some(3));
        assert!(validate_plan(&t, r.plan.as_ref().unwrap(), &GroundTruth::default()).valid);
        assert!(g24_expression(&ints(&[4, 4, 6, 8])).is_some());
        assert!(g24_expression(&ints(&[5, 5, 5, 9])).is_some());
        assert!(g24_expression(&ints(&[1, 1, 1, 1])).is_none());
    }

    #[test]
    fn scrambles_within_depth_and_not_below() {
        for seed in 0..5 {
            let (s, _) = scramble(3, seed, MoveSet::Full).unwrap();
            let t = PlanningTask::new("c", State::Cube2x2(s), Goal::Cube2x2).unwrap();
            let r = oracle_solve(&t, 3);
            let d = r.optimal_depth.unwrap();
            assert!(d <= 3);
            assert!(validate_plan(&t, r.plan.as_ref().unwrap(), &GroundTruth::default()).valid);
            if d > 0 {
                assert_eq!(oracle_solve(&t, d - 1).optimal_depth, None);
            }
        }
    }

    #[test]
    fn blocksworld_two_step_example() {
        let init = BlocksState::parse(
            "the blue block is clear, the orange block is in the hand, the red block is clear, the yellow block is clear, \
             the blue block is on the table, the red block is on the table, the yellow block is on the table",
        )
        .unwrap();
        let goal = BwGoal::parse("the orange block is on top of the red block, the blue block is on top of the yellow block").unwrap();
        let t = PlanningTask::new("bw", State::Blocksworld(init), Goal::Blocksworld(goal)).unwrap();
        // stack orange on red, then pick up blue and stack it on yellow
        assert_eq!(oracle_solve(&t, 6).optimal_depth, Some(3));
    }
}
