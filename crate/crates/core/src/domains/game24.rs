//! Game of 24 over exact rationals.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::DomainError;

pub const TARGET: i64 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '+' => Some(Op::Add),
            '-' | '−' => Some(Op::Sub),
            '*' | '×' | 'x' => Some(Op::Mul),
            '/' | '÷' => Some(Op::Div),
            _ => None,
        }
    }

    pub fn eval(self, a: Rational64, b: Rational64) -> Option<Rational64> {
        match self {
            Op::Add => a.checked_add(&b),
            Op::Sub => a.checked_sub(&b),
            Op::Mul => a.checked_mul(&b),
            Op::Div => {
                if b.is_zero() {
                    None
                } else {
                    a.checked_div(&b)
                }
            }
        }
    }
}

/// Combine `numbers[left]` and `numbers[right]` with `op`, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct G24Action {
    pub op: Op,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Game24State {
    numbers: Vec<Rational64>,
    history: Vec<String>,
}

pub fn fmt_rational(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Game24State {
    pub fn new(numbers: Vec<Rational64>) -> Result<Self, DomainError> {
        if numbers.is_empty() || numbers.len() > 4 {
            return Err(DomainError::InvalidState(format!("expected 1 to 4 numbers, got {}", numbers.len())));
        }
        Ok(Self { numbers, history: Vec::new() })
    }

    pub fn from_ints(numbers: &[i64]) -> Result<Self, DomainError> {
        Self::new(numbers.iter().map(|&n| Rational64::from_integer(n)).collect())
    }

    pub fn numbers(&self) -> &[Rational64] {
        &self.numbers
    }

    pub fn history(&self) -> &[String] {
        &self.history
    }

    /// Multiset key; history is not part of the state identity.
    pub fn key(&self) -> String {
        let mut sorted = self.numbers.clone();
        sorted.sort();
        let parts: Vec<String> = sorted.iter().map(fmt_rational).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn is_goal(&self) -> bool {
        self.numbers.len() == 1 && self.numbers[0] == Rational64::from_integer(TARGET)
    }

    /// For each unordered pair: `+`, `-`, reversed `-`, `*`, `/`, reversed `/`;
    /// divisions by zero are omitted.
    pub fn actions(&self) -> Vec<G24Action> {
        let n = self.numbers.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(G24Action { op: Op::Add, left: i, right: j });
                out.push(G24Action { op: Op::Sub, left: i, right: j });
                out.push(G24Action { op: Op::Sub, left: j, right: i });
                out.push(G24Action { op: Op::Mul, left: i, right: j });
                if !self.numbers[j].is_zero() {
                    out.push(G24Action { op: Op::Div, left: i, right: j });
                }
                if !self.numbers[i].is_zero() {
                    out.push(G24Action { op: Op::Div, left: j, right: i });
                }
            }
        }
        out
    }

    pub fn apply(&self, action: &G24Action) -> Result<Self, DomainError> {
        let n = self.numbers.len();
        let illegal = |reason: &str| DomainError::IllegalAction { action: format!("{action:?}"), reason: reason.into() };
        if action.left >= n || action.right >= n || action.left == action.right {
            return Err(illegal("operand index out of range"));
        }
        let a = self.numbers[action.left];
        let b = self.numbers[action.right];
        if action.op == Op::Div && b.is_zero() {
            return Err(illegal("division by zero"));
        }
        let r = action.op.eval(a, b).ok_or_else(|| illegal("arithmetic overflow"))?;
        let mut numbers: Vec<Rational64> = self
            .numbers
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != action.left && *k != action.right)
            .map(|(_, x)| *x)
            .collect();
        numbers.push(r);
        let mut history = self.history.clone();
        history.push(format!("{} {} {} = {}", fmt_rational(&a), action.op.symbol(), fmt_rational(&b), fmt_rational(&r)));
        Ok(Self { numbers, history })
    }

    pub fn describe(&self, action: &G24Action) -> String {
        match self.apply(action) {
            Ok(next) => next.history.last().cloned().unwrap_or_default(),
            Err(_) => format!("{action:?}"),
        }
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.numbers.iter().map(fmt_rational).collect();
        format!("[{}]", parts.join(", "))
    }

    /// Parses `[4, 6]`-style lists; entries may be integers or `p/q`.
    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let t = text.trim();
        let start = t.find('[').ok_or_else(|| parse_err(t, "missing '['"))?;
        let end = t[start..].find(']').map(|e| e + start).ok_or_else(|| parse_err(t, "missing ']'"))?;
        let inner = &t[start + 1..end];
        let mut numbers = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            numbers.push(parse_rational(part).ok_or_else(|| parse_err(part, "not a number"))?);
        }
        Self::new(numbers)
    }

    /// Matches an action phrase such as `4 * 6 = 24` or `4 * 6` against the
    /// legal actions of this state.
    pub fn parse_action(&self, text: &str) -> Option<G24Action> {
        let t = text.trim().trim_end_matches('.');
        let lhs = t.split('=').next()?.trim();
        let actions = self.actions();
        // try every operator position; a leading '-' belongs to the number
        lhs.char_indices().skip(1).find_map(|(i, c)| {
            let op = Op::from_symbol(c)?;
            let a = parse_rational(&lhs[..i])?;
            let b = parse_rational(&lhs[i + c.len_utf8()..])?;
            actions
                .iter()
                .copied()
                .find(|act| act.op == op && self.numbers[act.left] == a && self.numbers[act.right] == b)
        })
    }
}

fn parse_err(span: &str, msg: &str) -> DomainError {
    DomainError::Parse { span: 0..span.len(), message: format!("{msg}: {span:?}") }
}

pub fn parse_rational(text: &str) -> Option<Rational64> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational64::new(n, d));
    }
    if let Ok(n) = t.parse::<i64>() {
        return Some(Rational64::from_integer(n));
    }
    let f: f64 = t.parse().ok()?;
    if f.fract() == 0.0 && f.abs() < 1e15 {
        Some(Rational64::from_integer(f as i64))
    } else {
        Rational64::approximate_float(f)
    }
}

impl fmt::Display for Game24State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Every value obtainable by combining all of `numbers` with the four
/// operations in any order and grouping.
pub fn reachable_values(numbers: &[Rational64]) -> BTreeSet<Rational64> {
    let mut out = BTreeSet::new();
    collect_values(numbers, &mut out);
    out
}

fn collect_values(nums: &[Rational64], out: &mut BTreeSet<Rational64>) {
    if nums.len() == 1 {
        out.insert(nums[0]);
        return;
    }
    for i in 0..nums.len() {
        for j in 0..nums.len() {
            if i == j {
                continue;
            }
            let (a, b) = (nums[i], nums[j]);
            for op in [Op::Add, Op::Sub, Op::Mul, Op::Div] {
                // commutative ops need only one ordering
                if matches!(op, Op::Add | Op::Mul) && i > j {
                    continue;
                }
                let Some(r) = op.eval(a, b) else { continue };
                let mut rest: Vec<Rational64> =
                    nums.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, x)| *x).collect();
                rest.push(r);
                collect_values(&rest, out);
            }
        }
    }
}

/// Smallest |24 - v| over all expressions using every remaining number.
/// Results are memoized per sorted multiset.
pub fn min_expression_gap(numbers: &[Rational64]) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<Vec<Rational64>, f64>>> = OnceLock::new();
    let mut key = numbers.to_vec();
    key.sort();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&key) {
        return v;
    }
    let target = Rational64::from_integer(TARGET);
    let gap = reachable_values(&key)
        .into_iter()
        .map(|v| (target - v).abs())
        .min()
        .map(|r| *r.numer() as f64 / *r.denom() as f64)
        .unwrap_or(f64::INFINITY);
    cache.lock().unwrap().insert(key, gap);
    gap
}
