//! Heuristic-guided planning with evolved heuristics.
//!
//! Three domains (Blocksworld, Game of 24, 2x2 cube) share one planning
//! model. Heuristics are programs in a small sandboxed expression language
//! and guide greedy best-first or A* search.

pub mod domains;
pub mod dsl;
pub mod task;
pub mod search;
pub mod bench;
pub mod evolution;
