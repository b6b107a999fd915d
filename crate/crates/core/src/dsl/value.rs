use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde::Serialize;

use crate::domains::{DomainId, Support};
use crate::task::{Goal, State};

/// One row of a Blocksworld relational table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub block: String,
    /// `TABLE`, `HAND`, or the name of the block underneath.
    pub support: String,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Bool(bool),
    Str(Arc<str>),
    List(Arc<Vec<Value>>),
    Row(Arc<Row>),
}

impl Value {
    pub fn list(items: Vec<Value>) -> Self {
        Value::List(Arc::new(items))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Bool(_) => "bool",
            Value::Str(_) => "string",
            Value::List(_) => "list",
            Value::Row(_) => "row",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => write!(f, "{s}"),
            Value::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Value::Row(r) => write!(f, "({}, {}, {})", r.block, r.support, r.height),
        }
    }
}

/// The bindings a heuristic program sees for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateView {
    pub domain: DomainId,
    pub bindings: Vec<(&'static str, Value)>,
    /// Exact Game of 24 operands, kept alongside the real-valued list.
    pub exact: Option<Vec<Rational64>>,
}

impl StateView {
    pub fn new(state: &State, goal: &Goal) -> Self {
        match state {
            State::Cube2x2(c) => Self {
                domain: DomainId::Cube2x2,
                bindings: vec![(
                    "state",
                    Value::list(c.facelets().iter().map(|&x| Value::Num(f64::from(x))).collect()),
                )],
                exact: None,
            },
            State::Game24(g) => Self {
                domain: DomainId::Game24,
                bindings: vec![
                    (
                        "state",
                        Value::list(
                            g.numbers().iter().map(|r| Value::Num(*r.numer() as f64 / *r.denom() as f64)).collect(),
                        ),
                    ),
                    ("target", Value::Num(crate::domains::game24::TARGET as f64)),
                ],
                exact: Some(g.numbers().to_vec()),
            },
            State::Blocksworld(b) => {
                let mut current: Vec<Row> = b
                    .blocks()
                    .into_iter()
                    .map(|name| match b.position(name) {
                        Some((support, height)) => Row { block: name.to_string(), support: support.to_string(), height },
                        None => Row { block: name.to_string(), support: "HAND".into(), height: 0 },
                    })
                    .collect();
                current.sort_by(|x, y| x.block.cmp(&y.block));
                let goal_rows: Vec<Row> = match goal {
                    Goal::Blocksworld(g) => g
                        .required_on
                        .iter()
                        .map(|(name, support)| Row {
                            block: name.clone(),
                            support: match support {
                                Support::Table => "TABLE".into(),
                                Support::Block(x) => x.clone(),
                            },
                            height: g.height(name),
                        })
                        .collect(),
                    _ => Vec::new(),
                };
                Self {
                    domain: DomainId::Blocksworld,
                    bindings: vec![("state", rows_value(current)), ("goal", rows_value(goal_rows))],
                    exact: None,
                }
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().find(|(n, _)| *n == name).map(|(_, v)| v)
    }

    pub fn rows(&self, name: &str) -> Vec<Row> {
        match self.get(name) {
            Some(Value::List(items)) => items
                .iter()
                .filter_map(|v| match v {
                    Value::Row(r) => Some((**r).clone()),
                    _ => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn numbers(&self) -> Vec<f64> {
        match self.get("state") {
            Some(Value::List(items)) => items
                .iter()
                .filter_map(|v| match v {
                    Value::Num(x) => Some(*x),
                    _ => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn rows_value(rows: Vec<Row>) -> Value {
    Value::list(rows.into_iter().map(|r| Value::Row(Arc::new(r))).collect())
}
