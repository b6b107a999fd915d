//! Domain-agnostic planning types: tasks, states, actions, plan traces and
//! world models.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domains::{
    BlocksState, BwAction, BwGoal, CubeMove, CubeState, DomainError, DomainId, G24Action, Game24State, MoveSet,
};
use crate::dsl::{CompiledHeuristic, HValue, StateView};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "domain", content = "state", rename_all = "lowercase")]
pub enum State {
    Blocksworld(BlocksState),
    Game24(Game24State),
    Cube2x2(CubeState),
}

impl State {
    pub fn domain(&self) -> DomainId {
        match self {
            State::Blocksworld(_) => DomainId::Blocksworld,
            State::Game24(_) => DomainId::Game24,
            State::Cube2x2(_) => DomainId::Cube2x2,
        }
    }

    /// Canonical identity used for duplicate detection.
    pub fn key(&self) -> String {
        match self {
            State::Blocksworld(s) => format!("bw:{}", s.key()),
            State::Game24(s) => format!("g24:{}", s.key()),
            State::Cube2x2(s) => format!("cube:{}", s.key()),
        }
    }

    pub fn render(&self) -> String {
        match self {
            State::Blocksworld(s) => s.render(),
            State::Game24(s) => s.render(),
            State::Cube2x2(s) => s.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "domain", content = "action", rename_all = "lowercase")]
pub enum Action {
    Blocksworld(BwAction),
    Game24(G24Action),
    Cube2x2(CubeMove),
}

impl Action {
    /// Human-readable form in the domain's action language.
    pub fn describe(&self, before: &State) -> String {
        match (self, before) {
            (Action::Game24(a), State::Game24(s)) => s.describe(a),
            (Action::Blocksworld(a), _) => a.to_string(),
            (Action::Cube2x2(m), _) => m.to_string(),
            (a, _) => format!("{a:?}"),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Blocksworld(a) => write!(f, "{a}"),
            Action::Game24(a) => write!(f, "{}{}{}", a.left, a.op.symbol(), a.right),
            Action::Cube2x2(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "domain", content = "goal", rename_all = "lowercase")]
pub enum Goal {
    Blocksworld(BwGoal),
    /// A single number equal to 24.
    Game24,
    /// Every face monochromatic.
    Cube2x2,
}

impl Goal {
    pub fn is_satisfied(&self, state: &State) -> bool {
        match (self, state) {
            (Goal::Blocksworld(g), State::Blocksworld(s)) => g.is_satisfied(s),
            (Goal::Game24, State::Game24(s)) => s.is_goal(),
            (Goal::Cube2x2, State::Cube2x2(s)) => s.is_solved(),
            _ => false,
        }
    }

    pub fn domain(&self) -> DomainId {
        match self {
            Goal::Blocksworld(_) => DomainId::Blocksworld,
            Goal::Game24 => DomainId::Game24,
            Goal::Cube2x2 => DomainId::Cube2x2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningTask {
    pub instance_id: String,
    pub initial_state: State,
    pub goal: Goal,
    pub optimal_depth: Option<u32>,
    /// Cube instances record the move set they were generated under.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub move_set: Option<MoveSet>,
}

impl PlanningTask {
    pub fn new(instance_id: impl Into<String>, initial_state: State, goal: Goal) -> Result<Self, DomainError> {
        if initial_state.domain() != goal.domain() {
            return Err(DomainError::Precondition(format!(
                "state is {} but goal is {}",
                initial_state.domain(),
                goal.domain()
            )));
        }
        Ok(Self { instance_id: instance_id.into(), initial_state, goal, optimal_depth: None, move_set: None })
    }

    pub fn with_optimal_depth(mut self, depth: u32) -> Self {
        self.optimal_depth = Some(depth);
        self
    }

    pub fn domain(&self) -> DomainId {
        self.initial_state.domain()
    }

    pub fn view(&self, state: &State) -> StateView {
        StateView::new(state, &self.goal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub action: Action,
    pub state: State,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanTrace {
    pub origin: State,
    pub steps: Vec<PlanStep>,
}

impl PlanTrace {
    pub fn empty(origin: State) -> Self {
        Self { origin, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_state(&self) -> &State {
        self.steps.last().map(|s| &s.state).unwrap_or(&self.origin)
    }

    /// One line per action, in the domain's action language.
    pub fn describe(&self) -> Vec<String> {
        let mut prev = &self.origin;
        self.steps
            .iter()
            .map(|step| {
                let line = step.action.describe(prev);
                prev = &step.state;
                line
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMode {
    GroundTruth,
    ModelBacked,
}

/// Action generator and transition function of a planning task.
pub trait WorldModel: Send + Sync {
    fn mode(&self) -> ModelMode;

    fn actions(&self, state: &State) -> Vec<Action>;

    /// `None` marks a dead branch (the model could not produce a successor).
    fn transition(&self, state: &State, action: &Action) -> Option<State>;
}

/// Deterministic simulator for all three domains.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub cube_moves: MoveSet,
}

impl GroundTruth {
    pub fn new(cube_moves: MoveSet) -> Self {
        Self { cube_moves }
    }

    /// Simulator using the move set recorded on the task (full set if absent).
    pub fn for_task(task: &PlanningTask) -> Self {
        Self { cube_moves: task.move_set.unwrap_or_default() }
    }

    pub fn apply(&self, state: &State, action: &Action) -> Result<State, DomainError> {
        match (state, action) {
            (State::Blocksworld(s), Action::Blocksworld(a)) => s.apply(a).map(State::Blocksworld),
            (State::Game24(s), Action::Game24(a)) => s.apply(a).map(State::Game24),
            (State::Cube2x2(s), Action::Cube2x2(m)) => {
                if !self.cube_moves.contains(*m) {
                    return Err(DomainError::IllegalAction {
                        action: m.to_string(),
                        reason: "move is outside the configured move set".into(),
                    });
                }
                Ok(State::Cube2x2(s.apply(*m)))
            }
            _ => Err(DomainError::IllegalAction {
                action: format!("{action:?}"),
                reason: format!("action does not belong to domain {}", state.domain()),
            }),
        }
    }
}

impl WorldModel for GroundTruth {
    fn mode(&self) -> ModelMode {
        ModelMode::GroundTruth
    }

    fn actions(&self, state: &State) -> Vec<Action> {
        match state {
            State::Blocksworld(s) => s.actions().into_iter().map(Action::Blocksworld).collect(),
            State::Game24(s) => s.actions().into_iter().map(Action::Game24).collect(),
            State::Cube2x2(_) => self.cube_moves.moves().into_iter().map(Action::Cube2x2).collect(),
        }
    }

    fn transition(&self, state: &State, action: &Action) -> Option<State> {
        self.apply(state, action).ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Successor {
    pub action: Action,
    pub state: State,
    pub value: HValue,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredSuccessors {
    pub successors: Vec<Successor>,
    /// Heuristic evaluations that faulted (scored +inf).
    pub faults: usize,
    /// Actions whose transition produced no state.
    pub dead_branches: usize,
}

/// Scores every successor of `state`: `v_i = H(T(s, a_i))`. Heuristic faults
/// never propagate; they score +inf and are counted.
pub fn score_successors(
    task: &PlanningTask,
    state: &State,
    model: &dyn WorldModel,
    h: &CompiledHeuristic,
) -> ScoredSuccessors {
    let mut out = ScoredSuccessors::default();
    for action in model.actions(state) {
        let Some(next) = model.transition(state, &action) else {
            out.dead_branches += 1;
            continue;
        };
        let value = match h.evaluate(&task.view(&next)) {
            Ok(v) => v,
            Err(_) => {
                out.faults += 1;
                HValue::INFINITY
            }
        };
        out.successors.push(Successor { action, state: next, value });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub reason: String,
}

impl Validation {
    fn ok() -> Self {
        Self { valid: true, reason: "ok".into() }
    }

    fn fail(reason: String) -> Self {
        Self { valid: false, reason }
    }
}

/// Replays `trace` under the ground-truth simulator and checks the goal.
pub fn validate_plan(task: &PlanningTask, trace: &PlanTrace, ground_truth: &GroundTruth) -> Validation {
    if trace.origin.key() != task.initial_state.key() {
        return Validation::fail("trace does not start at the task's initial state".into());
    }
    if trace.steps.is_empty() {
        return if task.goal.is_satisfied(&trace.origin) {
            Validation::ok()
        } else {
            Validation::fail("no actions, goal unmet".into())
        };
    }
    let mut current = trace.origin.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        if !ground_truth.actions(&current).contains(&step.action) {
            return Validation::fail(format!("step {}: action {} is not legal", i + 1, step.action.describe(&current)));
        }
        let next = match ground_truth.apply(&current, &step.action) {
            Ok(n) => n,
            Err(e) => return Validation::fail(format!("step {}: {e}", i + 1)),
        };
        if next.key() != step.state.key() {
            return Validation::fail(format!(
                "step {}: recorded state {} differs from simulated {}",
                i + 1,
                step.state.render(),
                next.render()
            ));
        }
        current = next;
    }
    if task.goal.is_satisfied(&current) {
        Validation::ok()
    } else {
        Validation::fail(format!("goal unmet after {} actions", trace.steps.len()))
    }
}
