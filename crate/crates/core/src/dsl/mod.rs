//! The heuristic language: a small, total expression language for scoring
//! states, plus natively implemented reference heuristics.
//!
//! Programs have no I/O, randomness, recursion or user-defined functions.
//! Evaluation is bounded by [`EvalLimits`]; every failure is returned as a
//! typed [`Fault`].

pub mod ast;
mod eval;
pub mod parser;
pub mod pretty;
pub mod value;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use ast::{BinOp, Expr, Func};
pub use parser::{domain_bindings, ParseError, ParseErrorKind, Span};
pub use value::{Row, StateView, Value};

use crate::domains::DomainId;

/// Heuristic values live in the extended reals; `f64::INFINITY` marks a
/// state the heuristic could not score.
pub type HValue = f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalLimits {
    pub step_budget: usize,
    pub max_collection_size: usize,
}

impl Default for EvalLimits {
    fn default() -> Self {
        Self { step_budget: 100_000, max_collection_size: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    Syntax,
    Unbound,
    Type,
    DivZero,
    Budget,
    CollectionOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub kind: FaultKind,
    pub message: String,
}

impl Fault {
    pub fn new(kind: FaultKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

impl std::error::Error for Fault {}

impl From<&ParseError> for Fault {
    fn from(e: &ParseError) -> Self {
        let kind = match e.kind {
            ParseErrorKind::Unbound => FaultKind::Unbound,
            ParseErrorKind::Arity => FaultKind::Type,
            ParseErrorKind::Syntax => FaultKind::Syntax,
        };
        Fault::new(kind, e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    BwMisplacedPlusDistance,
    G24MinExprGap,
    CubeNonuniformFaces,
    /// h = 0 everywhere; turns A* into breadth-first search.
    Zero,
}

impl Builtin {
    pub const ALL: [Builtin; 4] =
        [Builtin::BwMisplacedPlusDistance, Builtin::G24MinExprGap, Builtin::CubeNonuniformFaces, Builtin::Zero];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::BwMisplacedPlusDistance => "bw_misplaced_plus_distance",
            Builtin::G24MinExprGap => "g24_min_expr_gap",
            Builtin::CubeNonuniformFaces => "cube_nonuniform_faces",
            Builtin::Zero => "zero",
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|b| b.name() == name)
    }

    /// Domain the builtin is defined for; `None` means any domain.
    pub fn domain(self) -> Option<DomainId> {
        match self {
            Builtin::BwMisplacedPlusDistance => Some(DomainId::Blocksworld),
            Builtin::G24MinExprGap => Some(DomainId::Game24),
            Builtin::CubeNonuniformFaces => Some(DomainId::Cube2x2),
            Builtin::Zero => None,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Builtin::BwMisplacedPlusDistance => {
                "Counts blocks whose support differs from the goal and adds their total height difference."
            }
            Builtin::G24MinExprGap => {
                "Smallest absolute difference between 24 and any expression over the remaining numbers."
            }
            Builtin::CubeNonuniformFaces => "Six minus the number of single-colored faces.",
            Builtin::Zero => "Constant zero.",
        }
    }

    /// The same heuristic written in the expression language.
    pub fn reference_source(self) -> &'static str {
        match self {
            Builtin::BwMisplacedPlusDistance => {
                "sum(map(r in state, sum(map(g in filter(g in goal, block(g) == block(r)), \
                 if support(g) != support(r) then 1 + abs(height(r) - height(g)) else 0))))"
            }
            Builtin::G24MinExprGap => "min(map(v in results(state), abs(target - v)))",
            Builtin::CubeNonuniformFaces => "6 - count(f in faces(state), uniform(f))",
            Builtin::Zero => "0",
        }
    }

    /// Default guiding heuristic for a domain.
    pub fn for_domain(domain: DomainId) -> Self {
        match domain {
            DomainId::Blocksworld => Builtin::BwMisplacedPlusDistance,
            DomainId::Game24 => Builtin::G24MinExprGap,
            DomainId::Cube2x2 => Builtin::CubeNonuniformFaces,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgramKind {
    DslSource,
    Builtin,
}

/// A heuristic as proposed: description plus source text or builtin name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicProgram {
    pub id: String,
    pub description: String,
    pub kind: ProgramKind,
    pub source: String,
    pub domain: DomainId,
}

pub fn program_id(kind: ProgramKind, source: &str, domain: DomainId) -> String {
    let mut hasher = Sha256::new();
    hasher.update(match kind {
        ProgramKind::DslSource => b"dsl\0".as_slice(),
        ProgramKind::Builtin => b"builtin\0".as_slice(),
    });
    hasher.update(domain.name().as_bytes());
    hasher.update(b"\0");
    hasher.update(source.as_bytes());
    let digest = hasher.finalize();
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl HeuristicProgram {
    /// Builds a source program; fails unless `source` parses for `domain`.
    pub fn dsl(domain: DomainId, description: impl Into<String>, source: impl Into<String>) -> Result<Self, ParseError> {
        let source = source.into();
        parser::parse(&source, domain)?;
        Ok(Self {
            id: program_id(ProgramKind::DslSource, &source, domain),
            description: description.into(),
            kind: ProgramKind::DslSource,
            source,
            domain,
        })
    }

    pub fn builtin(name: &str, domain: DomainId) -> Result<Self, String> {
        let b = Builtin::lookup(name).ok_or_else(|| format!("unknown builtin heuristic {name:?}"))?;
        if let Some(d) = b.domain() {
            if d != domain {
                return Err(format!("builtin {name} is defined for {d}, not {domain}"));
            }
        }
        Ok(Self {
            id: program_id(ProgramKind::Builtin, name, domain),
            description: b.description().into(),
            kind: ProgramKind::Builtin,
            source: name.into(),
            domain,
        })
    }

    pub fn compile(&self) -> Result<CompiledHeuristic, ParseError> {
        self.compile_with(EvalLimits::default())
    }

    pub fn compile_with(&self, limits: EvalLimits) -> Result<CompiledHeuristic, ParseError> {
        let body = match self.kind {
            ProgramKind::DslSource => Body::Ast(parser::parse(&self.source, self.domain)?),
            ProgramKind::Builtin => Body::Builtin(Builtin::lookup(&self.source).expect("validated at construction")),
        };
        Ok(CompiledHeuristic { program: self.clone(), body, limits })
    }

    /// Standalone file form: comment header plus source (or a builtin marker).
    pub fn to_file(&self) -> String {
        let mut out = String::new();
        for line in self.description.lines() {
            out.push_str("# Heuristic Description: ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("# domain: {}\n", self.domain));
        match self.kind {
            ProgramKind::DslSource => out.push_str(&self.source),
            ProgramKind::Builtin => out.push_str(&format!("# builtin: {}", self.source)),
        }
        out.push('\n');
        out
    }

    pub fn from_file(text: &str, domain: DomainId) -> Result<Self, String> {
        let mut description = Vec::new();
        for line in text.lines() {
            let l = line.trim();
            if let Some(d) = l.strip_prefix("# Heuristic Description:") {
                description.push(d.trim().to_string());
            } else if let Some(name) = l.strip_prefix("# builtin:") {
                return Self::builtin(name.trim(), domain);
            } else if let Some(d) = l.strip_prefix("# domain:") {
                let file_domain: DomainId = d.trim().parse().map_err(|e| format!("{e}"))?;
                if file_domain != domain {
                    return Err(format!("heuristic file targets {file_domain}, not {domain}"));
                }
            }
        }
        let source: String =
            text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n").trim().to_string();
        Self::dsl(domain, description.join(" "), source).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Ast(Expr),
    Builtin(Builtin),
}

/// A parsed, ready-to-run heuristic. Immutable and shareable.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledHeuristic {
    program: HeuristicProgram,
    body: Body,
    limits: EvalLimits,
}

impl CompiledHeuristic {
    pub fn program(&self) -> &HeuristicProgram {
        &self.program
    }

    pub fn domain(&self) -> DomainId {
        self.program.domain
    }

    pub fn limits(&self) -> EvalLimits {
        self.limits
    }

    pub fn ast(&self) -> Option<&Expr> {
        match &self.body {
            Body::Ast(e) => Some(e),
            Body::Builtin(_) => None,
        }
    }

    /// Scores one state view. NaN is reported as a fault.
    pub fn evaluate(&self, view: &StateView) -> Result<HValue, Fault> {
        if view.domain != self.program.domain {
            return Err(Fault::new(
                FaultKind::Type,
                format!("heuristic for {} applied to a {} state", self.program.domain, view.domain),
            ));
        }
        let v = match &self.body {
            Body::Ast(e) => eval::run(e, view, self.limits)?,
            Body::Builtin(b) => match b {
                Builtin::BwMisplacedPlusDistance => eval::bw_misplaced_plus_distance(view)?,
                Builtin::G24MinExprGap => eval::g24_min_expr_gap(view)?,
                Builtin::CubeNonuniformFaces => eval::cube_nonuniform_faces(view)?,
                Builtin::Zero => 0.0,
            },
        };
        if v.is_nan() {
            return Err(Fault::new(FaultKind::Type, "heuristic produced NaN"));
        }
        Ok(v)
    }

    /// Canonical source text (builtins print as their reference source).
    pub fn pretty_print(&self) -> String {
        match &self.body {
            Body::Ast(e) => pretty::print(e),
            Body::Builtin(b) => b.reference_source().to_string(),
        }
    }
}

/// Parses and compiles source text with default limits.
pub fn parse_program(source: &str, domain: DomainId) -> Result<CompiledHeuristic, ParseError> {
    HeuristicProgram::dsl(domain, "", source)?.compile()
}

pub fn builtin(name: &str, domain: DomainId) -> Result<CompiledHeuristic, String> {
    HeuristicProgram::builtin(name, domain)?.compile().map_err(|e| e.to_string())
}
