//! Randomized invariant suites for the domains, the heuristic language and
//! the search layer.

use std::collections::BTreeMap;

use autohd_core::bench::oracle_solve;
use autohd_core::domains::{BlocksState, BwGoal, CubeMove, CubeState, DomainId, Face, Game24State, MoveSet, Turn};
use autohd_core::dsl::{parse_program, CompiledHeuristic};
use autohd_core::search::{search, search_with_trace, Algorithm, SearchConfig};
use autohd_core::task::{score_successors, validate_plan, Action, Goal, GroundTruth, PlanningTask, State, WorldModel};
use num_rational::Rational64;
use proptest::prelude::*;

mod support;
use support::invariants;

const NAMES: [&str; 8] = ["red", "blue", "orange", "yellow", "green", "purple", "white", "black"];

fn all_moves() -> Vec<CubeMove> {
    MoveSet::Full.moves()
}

fn cube_from(seq: &[usize]) -> CubeState {
    let moves = all_moves();
    seq.iter().fold(CubeState::solved(), |s, &i| s.apply(moves[i % moves.len()]))
}

fn color_counts(s: &CubeState) -> BTreeMap<u8, usize> {
    let mut m = BTreeMap::new();
    for &c in s.facelets() {
        *m.entry(c).or_default() += 1;
    }
    m
}

fn cube_task(s: CubeState) -> PlanningTask {
    PlanningTask::new("p", State::Cube2x2(s), Goal::Cube2x2).unwrap()
}

fn g24_task(nums: &[i64]) -> PlanningTask {
    PlanningTask::new("p", State::Game24(Game24State::from_ints(nums).unwrap()), Goal::Game24).unwrap()
}

/// A random blocks world: blocks dealt into stacks, optionally one in hand.
fn blocks_state() -> impl Strategy<Value = BlocksState> {
    (1usize..=8, proptest::collection::vec(0usize..8, 8), any::<bool>(), any::<u64>()).prop_map(
        |(n, cuts, hold, perm_seed)| {
            let mut names: Vec<String> = NAMES[..n].iter().map(|s| s.to_string()).collect();
            let k = names.len();
            for i in (1..k).rev() {
                names.swap(i, (perm_seed as usize / (i + 1)).wrapping_add(i * 7) % (i + 1));
            }
            let holding = if hold && n > 1 { names.pop() } else { None };
            let mut stacks: Vec<Vec<String>> = Vec::new();
            for (i, b) in names.into_iter().enumerate() {
                if stacks.is_empty() || cuts[i] % 3 == 0 {
                    stacks.push(vec![b]);
                } else {
                    stacks.last_mut().unwrap().push(b);
                }
            }
            BlocksState::new(stacks, holding).unwrap()
        },
    )
}

fn block_multiset(s: &BlocksState) -> Vec<String> {
    s.blocks().into_iter().map(str::to_string).collect()
}

// Cube permutation group.

#[test]
fn quarter_turns_have_order_four_and_compose_to_half_turns() {
    let start = cube_from(&[0, 4, 7, 11, 13, 16]);
    for face in Face::ALL {
        let q = CubeMove::new(face, Turn::Cw90);
        let h = CubeMove::new(face, Turn::Half);
        let cc = CubeMove::new(face, Turn::Ccw90);
        let mut s = start;
        for i in 1..=4 {
            s = s.apply(q);
            assert_eq!(s == start, i == 4, "{face:?} after {i} quarter turns");
        }
        assert_eq!(start.apply(q).apply(q), start.apply(h));
        assert_eq!(start.apply(q).apply(cc), start);
        assert_eq!(start.apply(cc).apply(q), start);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn every_move_preserves_four_of_each_color(seq in proptest::collection::vec(0usize..18, 0..30)) {
        let s = cube_from(&seq);
        prop_assert!(color_counts(&s).values().all(|&c| c == 4));
        prop_assert_eq!(color_counts(&s).len(), 6);
    }

    #[test]
    fn inverse_sequence_restores_the_cube(seq in proptest::collection::vec(0usize..18, 0..30)) {
        let moves = all_moves();
        let s = cube_from(&seq);
        let back = seq.iter().rev().fold(s, |s, &i| s.apply(moves[i].inverse()));
        prop_assert!(back.is_solved());
    }
}

// Blocksworld.

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn blocks_state_render_parse_round_trip(s in blocks_state()) {
        let text = s.render();
        let back = BlocksState::parse(&text).map_err(|e| TestCaseError::fail(format!("{e}: {text}")))?;
        prop_assert_eq!(back.key(), s.key());
        let goal = BwGoal::from_state(&s);
        let g = BwGoal::parse(&goal.render()).unwrap();
        prop_assert_eq!(g, goal);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn blocks_actions_conserve_blocks_and_recompute_clear(s in blocks_state(), picks in proptest::collection::vec(any::<usize>(), 1..12)) {
        let before = block_multiset(&s);
        let mut cur = s;
        for p in picks {
            let acts = cur.actions();
            prop_assert!(!acts.is_empty());
            cur = cur.apply(&acts[p % acts.len()]).unwrap();
            prop_assert_eq!(block_multiset(&cur), before.clone());
            for stack in cur.stacks() {
                for (i, b) in stack.iter().enumerate() {
                    prop_assert_eq!(cur.is_clear(b), i + 1 == stack.len());
                }
            }
            if let Some(h) = cur.holding() {
                prop_assert!(!cur.is_clear(h));
            }
        }
    }
}

// Game of 24.

proptest! {
    #[test]
    fn game24_actions_remove_exactly_one_number(nums in proptest::collection::vec(1i64..14, 2..=4)) {
        let s = Game24State::from_ints(&nums).unwrap();
        let total: Rational64 = s.numbers().iter().sum();
        for a in s.actions() {
            let next = s.apply(&a).unwrap();
            prop_assert_eq!(next.numbers().len(), nums.len() - 1);
            if a.op == autohd_core::domains::Op::Add {
                prop_assert_eq!(next.numbers().iter().sum::<Rational64>(), total);
            }
        }
    }
}

// Heuristic language fuzzing.

#[test]
fn generated_programs_never_crash_and_every_failure_is_typed() {
    let summary = invariants::dsl_fuzz(2024, 10_000).unwrap();
    assert!(summary.contains("0 crashes"), "{summary}");
}

#[test]
fn fuzzing_reaches_several_fault_kinds() {
    let mut g = invariants::ProgramGen::new(7);
    let mut kinds = std::collections::BTreeSet::new();
    for i in 0..3_000 {
        let domain = DomainId::ALL[i % 3];
        let Ok(h) = parse_program(&g.program(domain, 5), domain) else { continue };
        for (t, s) in invariants::sample_views(domain) {
            if let Err(f) = h.evaluate(&t.view(&s)) {
                kinds.insert(format!("{:?}", f.kind));
            }
        }
    }
    assert!(kinds.len() >= 2, "fault kinds seen: {kinds:?}");
}

#[test]
fn pretty_printing_round_trips_generated_programs() {
    let mut g = invariants::ProgramGen::new(99);
    for i in 0..2_000 {
        let domain = DomainId::ALL[i % 3];
        let src = g.program(domain, 4);
        let Ok(h) = parse_program(&src, domain) else { continue };
        let printed = h.pretty_print();
        let again = parse_program(&printed, domain).unwrap_or_else(|e| panic!("{e}\n{src}\n=> {printed}"));
        assert_eq!(again.ast(), h.ast(), "{src}\n=> {printed}");
        assert_eq!(again.pretty_print(), printed);
    }
}

#[test]
fn seeded_suites_pass() {
    invariants::cube_group(11, 50).unwrap();
    invariants::blocks_round_trip(12, 1_000).unwrap();
    invariants::greedy_scaling(13, 30).unwrap();
}

// Search layer.

fn compile(src: &str, domain: DomainId) -> CompiledHeuristic {
    parse_program(src, domain).unwrap()
}

const CUBE_H: &str = invariants::CUBE_HEURISTICS[0];
const CUBE_H2: &str = invariants::CUBE_HEURISTICS[1];
const G24_H: &str = invariants::G24_HEURISTIC;

fn popped(task: &PlanningTask, h: &CompiledHeuristic, budget: usize) -> (Vec<String>, usize) {
    let mut cfg = SearchConfig::for_task(task, Algorithm::GreedyBfs);
    cfg.expansion_budget = budget;
    let mut keys = Vec::new();
    let r = search_with_trace(task, &GroundTruth::for_task(task), h, &cfg, &mut |t| keys.push(t.state_key));
    (keys, r.stats.heuristic_faults)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn greedy_pop_order_is_invariant_under_doubling(seq in proptest::collection::vec(0usize..18, 1..7), which in 0usize..2) {
        let task = cube_task(cube_from(&seq));
        let src = [CUBE_H, CUBE_H2][which];
        let (a, fa) = popped(&task, &compile(src, DomainId::Cube2x2), 300);
        let (b, fb) = popped(&task, &compile(&format!("2 * ({src})"), DomainId::Cube2x2), 300);
        prop_assume!(fa == 0 && fb == 0);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn greedy_pop_order_is_invariant_under_doubling_game24(nums in proptest::collection::vec(1i64..14, 4)) {
        let task = g24_task(&nums);
        let (a, fa) = popped(&task, &compile(G24_H, DomainId::Game24), 200);
        let (b, fb) = popped(&task, &compile(&format!("2 * ({G24_H})"), DomainId::Game24), 200);
        prop_assume!(fa == 0 && fb == 0);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn emitted_plans_validate_and_respect_the_cap(seq in proptest::collection::vec(0usize..18, 1..6), astar in any::<bool>(), k in 1usize..4) {
        let task = cube_task(cube_from(&seq));
        let alg = if astar { Algorithm::Astar } else { Algorithm::GreedyBfs };
        let mut cfg = SearchConfig::for_task(&task, alg);
        cfg.num_solutions = k;
        let gt = GroundTruth::for_task(&task);
        let r = search(&task, &gt, &compile(CUBE_H2, DomainId::Cube2x2), &cfg);
        prop_assert_eq!(r.solved(), !r.plans.is_empty());
        for p in &r.plans {
            prop_assert!(validate_plan(&task, p, &gt).valid);
            prop_assert!(p.len() as u32 <= cfg.depth_cap);
        }
    }

    #[test]
    fn larger_budget_keeps_a_solved_first_plan(seq in proptest::collection::vec(0usize..18, 1..6), astar in any::<bool>(), small in 1usize..60) {
        let task = cube_task(cube_from(&seq));
        let alg = if astar { Algorithm::Astar } else { Algorithm::GreedyBfs };
        let h = compile(CUBE_H2, DomainId::Cube2x2);
        let gt = GroundTruth::for_task(&task);
        let mut cfg = SearchConfig::for_task(&task, alg);
        cfg.expansion_budget = small;
        let a = search(&task, &gt, &h, &cfg);
        cfg.expansion_budget = small * 10;
        let b = search(&task, &gt, &h, &cfg);
        if a.solved() {
            prop_assert!(b.solved());
            prop_assert_eq!(a.plans[0].describe(), b.plans[0].describe());
        }
    }

    #[test]
    fn ground_truth_replay_is_deterministic(seq in proptest::collection::vec(0usize..18, 0..8), m in 0usize..18) {
        let s = State::Cube2x2(cube_from(&seq));
        let s2 = State::Cube2x2(cube_from(&seq));
        let gt = GroundTruth::default();
        let a = Action::Cube2x2(all_moves()[m]);
        prop_assert_eq!(gt.transition(&s, &a).unwrap().key(), gt.transition(&s2, &a).unwrap().key());
    }
}

#[test]
fn depth_one_instances_need_at_most_one_expansion() {
    for m in all_moves() {
        let task = cube_task(CubeState::solved().apply(m));
        for alg in [Algorithm::Astar, Algorithm::GreedyBfs] {
            let cfg = SearchConfig::for_task(&task, alg);
            let r = search(&task, &GroundTruth::default(), &compile(CUBE_H, DomainId::Cube2x2), &cfg);
            assert!(r.solved() && r.stats.expansions <= 1, "{m} {alg:?}: {} expansions", r.stats.expansions);
        }
    }
}

#[test]
fn faulting_successors_are_counted_exactly() {
    // Every successor of a four-number state has three numbers, so each
    // evaluation divides by zero.
    let task = g24_task(&[1, 2, 3, 4]);
    let h = compile("1 / (len(state) - 3)", DomainId::Game24);
    let gt = GroundTruth::default();
    let scored = score_successors(&task, &task.initial_state, &gt, &h);
    assert_eq!(scored.faults, gt.actions(&task.initial_state).len());
    assert!(scored.successors.iter().all(|s| s.value == f64::INFINITY));
}

#[test]
fn oracle_plans_validate_and_are_minimal() {
    for seq in [vec![0usize], vec![3, 9], vec![1, 6, 14], vec![2, 5, 10, 16]] {
        let task = cube_task(cube_from(&seq));
        let r = oracle_solve(&task, 6);
        let d = r.optimal_depth.unwrap();
        assert!(d as usize <= seq.len());
        assert!(validate_plan(&task, r.plan.as_ref().unwrap(), &GroundTruth::default()).valid);
        if d > 0 {
            assert_eq!(oracle_solve(&task, d - 1).optimal_depth, None);
        }
    }
}
