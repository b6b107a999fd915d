//! Ground-truth simulators, parsers and renderers for the three benchmark
//! domains.

pub mod blocks;
pub mod cube;
pub mod game24;

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use blocks::{BlocksState, BwAction, BwActionKind, BwGoal, Support};
pub use cube::{scramble, CubeMove, CubeState, Face, MoveSet, Turn};
pub use game24::{G24Action, Game24State, Op};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainId {
    Blocksworld,
    Game24,
    Cube2x2,
}

impl DomainId {
    pub const ALL: [DomainId; 3] = [DomainId::Blocksworld, DomainId::Game24, DomainId::Cube2x2];

    pub fn name(self) -> &'static str {
        match self {
            DomainId::Blocksworld => "blocksworld",
            DomainId::Game24 => "game24",
            DomainId::Cube2x2 => "cube2x2",
        }
    }

    /// Plan-length ceiling used when no optimal depth is known.
    pub fn depth_cap(self) -> u32 {
        match self {
            DomainId::Blocksworld => 20,
            DomainId::Game24 => 3,
            DomainId::Cube2x2 => 11,
        }
    }

    pub fn default_expansion_budget(self) -> usize {
        match self {
            DomainId::Blocksworld => 600,
            DomainId::Game24 => 200,
            DomainId::Cube2x2 => 2_000,
        }
    }
}

impl std::fmt::Display for DomainId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DomainId {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "blocksworld" | "bw" => Ok(DomainId::Blocksworld),
            "game24" | "g24" => Ok(DomainId::Game24),
            "cube2x2" | "cube" => Ok(DomainId::Cube2x2),
            _ => Err(DomainError::Precondition(format!("unknown domain {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("parse error at {}..{}: {message}", span.start, span.end)]
    Parse { span: Range<usize>, message: String },
    #[error("inconsistent state: {0}")]
    Inconsistent(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("illegal action {action}: {reason}")]
    IllegalAction { action: String, reason: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}
