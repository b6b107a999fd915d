//! Blocksworld with a single hand.
//!
//! States are kept canonical: stacks are listed bottom-to-top and sorted by
//! their bottom block, so equal configurations compare equal regardless of
//! how they were built.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::DomainError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Support {
    Table,
    Block(String),
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Table => write!(f, "TABLE"),
            Support::Block(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlocksState {
    stacks: Vec<Vec<String>>,
    holding: Option<String>,
}

impl BlocksState {
    pub fn new(stacks: Vec<Vec<String>>, holding: Option<String>) -> Result<Self, DomainError> {
        let mut seen = BTreeSet::new();
        for name in stacks.iter().flatten().chain(holding.iter()) {
            if name.is_empty() {
                return Err(DomainError::InvalidState("empty block name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(DomainError::InvalidState(format!("block {name} appears twice")));
            }
        }
        let mut stacks: Vec<Vec<String>> = stacks.into_iter().filter(|s| !s.is_empty()).collect();
        stacks.sort();
        Ok(Self { stacks, holding })
    }

    pub fn stacks(&self) -> &[Vec<String>] {
        &self.stacks
    }

    pub fn holding(&self) -> Option<&str> {
        self.holding.as_deref()
    }

    pub fn blocks(&self) -> BTreeSet<&str> {
        self.stacks.iter().flatten().chain(self.holding.iter()).map(String::as_str).collect()
    }

    pub fn is_clear(&self, block: &str) -> bool {
        self.stacks.iter().any(|s| s.last().map(String::as_str) == Some(block))
    }

    /// Support and zero-based stack index of a block; `None` when held or unknown.
    pub fn position(&self, block: &str) -> Option<(Support, usize)> {
        for stack in &self.stacks {
            if let Some(i) = stack.iter().position(|b| b == block) {
                let support = if i == 0 { Support::Table } else { Support::Block(stack[i - 1].clone()) };
                return Some((support, i));
            }
        }
        None
    }

    pub fn key(&self) -> String {
        let mut out = String::new();
        for s in &self.stacks {
            out.push('[');
            out.push_str(&s.join(","));
            out.push(']');
        }
        out.push('|');
        if let Some(h) = &self.holding {
            out.push_str(h);
        }
        out
    }

    /// All legal actions ordered by kind, then block, then target.
    pub fn actions(&self) -> Vec<BwAction> {
        let mut out = Vec::new();
        match &self.holding {
            None => {
                for stack in &self.stacks {
                    let top = stack.last().expect("stacks are nonempty");
                    if stack.len() == 1 {
                        out.push(BwAction::pickup(top));
                    } else {
                        out.push(BwAction::unstack(top, &stack[stack.len() - 2]));
                    }
                }
            }
            Some(held) => {
                out.push(BwAction::putdown(held));
                for stack in &self.stacks {
                    out.push(BwAction::stack(held, stack.last().expect("stacks are nonempty")));
                }
            }
        }
        out.sort();
        out
    }

    pub fn apply(&self, action: &BwAction) -> Result<Self, DomainError> {
        let illegal = |reason: String| DomainError::IllegalAction { action: action.to_string(), reason };
        let mut next = self.clone();
        match action.kind {
            BwActionKind::Pickup | BwActionKind::Unstack => {
                if self.holding.is_some() {
                    return Err(illegal("the hand is not empty".into()));
                }
                let idx = self
                    .stacks
                    .iter()
                    .position(|s| s.last() == Some(&action.block))
                    .ok_or_else(|| illegal(format!("{} is not clear", action.block)))?;
                let stack = &self.stacks[idx];
                match (&action.kind, &action.target) {
                    (BwActionKind::Pickup, _) if stack.len() != 1 => {
                        return Err(illegal(format!("{} is not on the table", action.block)));
                    }
                    (BwActionKind::Unstack, Some(below)) => {
                        if stack.len() < 2 || &stack[stack.len() - 2] != below {
                            return Err(illegal(format!("{} is not on top of {below}", action.block)));
                        }
                    }
                    (BwActionKind::Unstack, None) => return Err(illegal("unstack needs a target".into())),
                    _ => {}
                }
                next.stacks[idx].pop();
                next.holding = Some(action.block.clone());
            }
            BwActionKind::Putdown => {
                if self.holding.as_ref() != Some(&action.block) {
                    return Err(illegal(format!("the hand is not holding {}", action.block)));
                }
                next.holding = None;
                next.stacks.push(vec![action.block.clone()]);
            }
            BwActionKind::Stack => {
                if self.holding.as_ref() != Some(&action.block) {
                    return Err(illegal(format!("the hand is not holding {}", action.block)));
                }
                let target = action.target.as_ref().ok_or_else(|| illegal("stack needs a target".into()))?;
                let idx = self
                    .stacks
                    .iter()
                    .position(|s| s.last() == Some(target))
                    .ok_or_else(|| illegal(format!("{target} is not clear")))?;
                next.holding = None;
                next.stacks[idx].push(action.block.clone());
            }
        }
        next.stacks.retain(|s| !s.is_empty());
        next.stacks.sort();
        Ok(next)
    }

    /// Natural-language description in the prompt idiom.
    pub fn render(&self) -> String {
        let mut phrases = Vec::new();
        let mut clear: Vec<&str> = self.stacks.iter().filter_map(|s| s.last().map(String::as_str)).collect();
        clear.sort();
        for b in clear {
            phrases.push(format!("the {b} block is clear"));
        }
        match &self.holding {
            None => phrases.push("the hand is empty".into()),
            Some(h) => phrases.push(format!("the hand is holding the {h} block")),
        }
        let mut on_top: Vec<(&str, &str)> = Vec::new();
        let mut on_table: Vec<&str> = Vec::new();
        for s in &self.stacks {
            on_table.push(&s[0]);
            for w in s.windows(2) {
                on_top.push((&w[1], &w[0]));
            }
        }
        on_top.sort();
        on_table.sort();
        for (upper, lower) in on_top {
            phrases.push(format!("the {upper} block is on top of the {lower} block"));
        }
        for b in on_table {
            phrases.push(format!("the {b} block is on the table"));
        }
        join_phrases(&phrases)
    }

    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let preds = parse_predicates(text)?;
        state_from_predicates(&preds)
    }
}

fn join_phrases(phrases: &[String]) -> String {
    match phrases.len() {
        0 => String::new(),
        1 => phrases[0].clone(),
        n => format!("{}, and {}", phrases[..n - 1].join(", "), phrases[n - 1]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BwActionKind {
    Pickup,
    Putdown,
    Stack,
    Unstack,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BwAction {
    pub kind: BwActionKind,
    pub block: String,
    pub target: Option<String>,
}

impl BwAction {
    pub fn pickup(block: &str) -> Self {
        Self { kind: BwActionKind::Pickup, block: block.into(), target: None }
    }
    pub fn putdown(block: &str) -> Self {
        Self { kind: BwActionKind::Putdown, block: block.into(), target: None }
    }
    pub fn stack(block: &str, onto: &str) -> Self {
        Self { kind: BwActionKind::Stack, block: block.into(), target: Some(onto.into()) }
    }
    pub fn unstack(block: &str, from: &str) -> Self {
        Self { kind: BwActionKind::Unstack, block: block.into(), target: Some(from.into()) }
    }

    /// Parses the action phrases produced by `Display` (case-insensitive,
    /// trailing punctuation and list markers tolerated).
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim().trim_end_matches('.').to_lowercase();
        let t = t.trim_start_matches(|c: char| c.is_ascii_digit() || c == '.' || c == '-' || c == ')' || c == '*');
        let words: Vec<&str> = t.split_whitespace().collect();
        let rest = |n: usize| words[n..].join(" ");
        match words.as_slice() {
            ["pick", "up", ..] => Some(Self::pickup(&block_name(&rest(2))?)),
            ["put", "down", ..] => Some(Self::putdown(&block_name(&rest(2))?)),
            ["stack", ..] => {
                let (a, b) = rest(1).split_once(" on top of ").map(|(a, b)| (a.to_string(), b.to_string()))?;
                Some(Self::stack(&block_name(&a)?, &block_name(&b)?))
            }
            ["unstack", ..] => {
                let r = rest(1);
                let (a, b) = r.split_once(" from on top of ").or_else(|| r.split_once(" from "))?;
                Some(Self::unstack(&block_name(a)?, &block_name(b)?))
            }
            _ => None,
        }
    }
}

impl fmt::Display for BwAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let target = self.target.as_deref().unwrap_or("?");
        match self.kind {
            BwActionKind::Pickup => write!(f, "pick up the {} block", self.block),
            BwActionKind::Putdown => write!(f, "put down the {} block", self.block),
            BwActionKind::Stack => write!(f, "stack the {} block on top of the {} block", self.block, target),
            BwActionKind::Unstack => write!(f, "unstack the {} block from on top of the {} block", self.block, target),
        }
    }
}

/// Partial goal: a conjunction of the stated predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BwGoal {
    pub required_on: BTreeMap<String, Support>,
    pub required_clear: BTreeSet<String>,
    pub required_hand_empty: Option<bool>,
    /// Block that must be in the hand; implies `required_hand_empty == Some(false)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_holding: Option<String>,
}

impl BwGoal {
    pub fn new(
        required_on: BTreeMap<String, Support>,
        required_clear: BTreeSet<String>,
        required_hand_empty: Option<bool>,
    ) -> Result<Self, DomainError> {
        for start in required_on.keys() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(Support::Block(next)) = required_on.get(cur) {
                steps += 1;
                if next == start || steps > required_on.len() {
                    return Err(DomainError::Inconsistent(format!("goal relation is cyclic through {start}")));
                }
                cur = next;
            }
        }
        Ok(Self { required_on, required_clear, required_hand_empty, required_holding: None })
    }

    /// Goal that pins every block of `state` to its current support.
    pub fn from_state(state: &BlocksState) -> Self {
        let mut on = BTreeMap::new();
        for s in state.stacks() {
            on.insert(s[0].clone(), Support::Table);
            for w in s.windows(2) {
                on.insert(w[1].clone(), Support::Block(w[0].clone()));
            }
        }
        let clear = state.stacks().iter().map(|s| s.last().unwrap().clone()).collect();
        Self {
            required_on: on,
            required_clear: clear,
            required_hand_empty: Some(state.holding.is_none()),
            required_holding: state.holding.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let mut on = BTreeMap::new();
        let mut clear = BTreeSet::new();
        let mut hand_empty = None;
        let mut holding: Option<String> = None;
        for (pred, span) in parse_predicates(text)? {
            let conflict = |what: &str| DomainError::Inconsistent(format!("{what} (at {}..{})", span.start, span.end));
            match pred {
                Predicate::Clear(b) => {
                    clear.insert(b);
                }
                Predicate::HandEmpty => {
                    if hand_empty == Some(false) {
                        return Err(conflict("hand both empty and holding"));
                    }
                    hand_empty = Some(true);
                }
                Predicate::Holding(b) => {
                    if hand_empty == Some(true) {
                        return Err(conflict("hand both empty and holding"));
                    }
                    if holding.as_ref().is_some_and(|h| *h != b) {
                        return Err(conflict("hand holding two blocks"));
                    }
                    hand_empty = Some(false);
                    holding = Some(b);
                }
                Predicate::OnTop(a, b) => {
                    if on.insert(a.clone(), Support::Block(b)).is_some() {
                        return Err(conflict(&format!("two supports for {a}")));
                    }
                }
                Predicate::OnTable(a) => {
                    if on.insert(a.clone(), Support::Table).is_some() {
                        return Err(conflict(&format!("two supports for {a}")));
                    }
                }
            }
        }
        let mut goal = Self::new(on, clear, hand_empty)?;
        goal.required_holding = holding;
        Ok(goal)
    }

    pub fn render(&self) -> String {
        let mut phrases: Vec<String> = self.required_clear.iter().map(|b| format!("the {b} block is clear")).collect();
        match (&self.required_holding, self.required_hand_empty) {
            (Some(b), _) => phrases.push(format!("the hand is holding the {b} block")),
            (None, Some(true)) => phrases.push("the hand is empty".into()),
            _ => {}
        }
        for (a, s) in &self.required_on {
            if let Support::Block(b) = s {
                phrases.push(format!("the {a} block is on top of the {b} block"));
            }
        }
        for (a, s) in &self.required_on {
            if *s == Support::Table {
                phrases.push(format!("the {a} block is on the table"));
            }
        }
        join_phrases(&phrases)
    }

    pub fn is_satisfied(&self, state: &BlocksState) -> bool {
        if let Some(empty) = self.required_hand_empty {
            if empty != state.holding.is_none() {
                return false;
            }
        }
        if self.required_holding.is_some() && self.required_holding != state.holding {
            return false;
        }
        self.required_clear.iter().all(|b| state.is_clear(b))
            && self
                .required_on
                .iter()
                .all(|(b, want)| state.position(b).is_some_and(|(have, _)| &have == want))
    }

    /// Height of a goal block: the number of `on` links below it in the goal
    /// relation (0 for table, and 0 at the bottom of an unanchored chain).
    pub fn height(&self, block: &str) -> usize {
        let mut h = 0;
        let mut cur = block;
        while let Some(Support::Block(next)) = self.required_on.get(cur) {
            h += 1;
            cur = next;
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Predicate {
    Clear(String),
    HandEmpty,
    OnTop(String, String),
    OnTable(String),
    Holding(String),
}

fn block_name(phrase: &str) -> Option<String> {
    let p = phrase.trim();
    let p = p.strip_prefix("the ").unwrap_or(p);
    let p = p.strip_suffix(" block").unwrap_or(p).trim();
    if p.is_empty() || p.contains(char::is_whitespace) {
        return None;
    }
    if !p.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
        return None;
    }
    Some(p.to_string())
}

fn classify(phrase: &str) -> Option<Predicate> {
    if phrase == "the hand is empty" || phrase == "hand is empty" {
        return Some(Predicate::HandEmpty);
    }
    if let Some(rest) = phrase.strip_prefix("the hand is holding ") {
        return block_name(rest).map(Predicate::Holding);
    }
    if let Some(subject) = phrase.strip_suffix(" is clear") {
        return block_name(subject).map(Predicate::Clear);
    }
    if let Some(subject) = phrase.strip_suffix(" is on the table") {
        return block_name(subject).map(Predicate::OnTable);
    }
    if let Some(subject) = phrase.strip_suffix(" is in the hand") {
        return block_name(subject).map(Predicate::Holding);
    }
    if let Some((a, b)) = phrase.split_once(" is on top of ") {
        return Some(Predicate::OnTop(block_name(a)?, block_name(b)?));
    }
    None
}

/// Splits on commas and the word "and", keeping byte spans into the input.
fn split_phrases(text: &str) -> Vec<(String, Range<usize>)> {
    let lower = text.to_lowercase();
    // byte offsets are preserved because lowercasing ASCII keeps lengths;
    // fall back to the lowered text offsets for non-ASCII input
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = lower.as_bytes();
    let mut i = 0;
    let push = |from: usize, to: usize, out: &mut Vec<(String, Range<usize>)>| {
        let raw = &lower[from..to];
        let trimmed = raw.trim().trim_end_matches('.').trim();
        let trimmed = trimmed.strip_prefix("and ").unwrap_or(trimmed).trim();
        if !trimmed.is_empty() {
            let offset = from + raw.find(trimmed).unwrap_or(0);
            out.push((trimmed.to_string(), offset..offset + trimmed.len()));
        }
    };
    while i < bytes.len() {
        if bytes[i] == b',' || bytes[i] == b'\n' || bytes[i] == b';' {
            push(start, i, &mut out);
            start = i + 1;
        } else if lower[i..].starts_with(" and ") {
            push(start, i, &mut out);
            start = i + 5;
            i += 4;
        }
        i += 1;
    }
    push(start, lower.len(), &mut out);
    out
}

fn parse_predicates(text: &str) -> Result<Vec<(Predicate, Range<usize>)>, DomainError> {
    split_phrases(text)
        .into_iter()
        .map(|(phrase, span)| match classify(&phrase) {
            Some(p) => Ok((p, span)),
            None => Err(DomainError::Parse { span, message: format!("unknown phrase {phrase:?}") }),
        })
        .collect()
}

fn state_from_predicates(preds: &[(Predicate, Range<usize>)]) -> Result<BlocksState, DomainError> {
    #[derive(PartialEq)]
    enum Place {
        Table,
        On(String),
        Hand,
    }
    let mut place: BTreeMap<String, Place> = BTreeMap::new();
    let mut mentioned = BTreeSet::new();
    let mut clear = BTreeSet::new();
    let mut hand_empty = false;
    let mut set_place = |b: &str, p: Place, span: &Range<usize>| -> Result<(), DomainError> {
        match place.get(b) {
            Some(existing) if *existing == p => Ok(()),
            Some(_) => Err(DomainError::Inconsistent(format!(
                "conflicting positions for {b} (at {}..{})",
                span.start, span.end
            ))),
            None => {
                place.insert(b.to_string(), p);
                Ok(())
            }
        }
    };
    for (pred, span) in preds {
        match pred {
            Predicate::Clear(b) => {
                mentioned.insert(b.clone());
                clear.insert(b.clone());
            }
            Predicate::HandEmpty => hand_empty = true,
            Predicate::OnTop(a, b) => {
                if a == b {
                    return Err(DomainError::Inconsistent(format!("{a} cannot be on top of itself")));
                }
                mentioned.insert(a.clone());
                mentioned.insert(b.clone());
                set_place(a, Place::On(b.clone()), span)?;
            }
            Predicate::OnTable(a) => {
                mentioned.insert(a.clone());
                set_place(a, Place::Table, span)?;
            }
            Predicate::Holding(a) => {
                mentioned.insert(a.clone());
                set_place(a, Place::Hand, span)?;
            }
        }
    }
    let held: Vec<&String> = place.iter().filter(|(_, p)| **p == Place::Hand).map(|(b, _)| b).collect();
    if held.len() > 1 {
        return Err(DomainError::Inconsistent("the hand holds more than one block".into()));
    }
    if hand_empty && !held.is_empty() {
        return Err(DomainError::Inconsistent(format!("the hand is empty but holds {}", held[0])));
    }
    if let Some(b) = mentioned.iter().find(|b| !place.contains_key(*b)) {
        return Err(DomainError::Inconsistent(format!("no position stated for {b}")));
    }
    let mut above: BTreeMap<&str, &str> = BTreeMap::new();
    for (b, p) in &place {
        if let Place::On(below) = p {
            if place.get(below) == Some(&Place::Hand) {
                return Err(DomainError::Inconsistent(format!("{b} rests on the held block {below}")));
            }
            if let Some(other) = above.insert(below.as_str(), b.as_str()) {
                return Err(DomainError::Inconsistent(format!("{other} and {b} are both on {below}")));
            }
        }
    }
    let mut stacks = Vec::new();
    let mut placed = 0;
    for (b, p) in &place {
        if *p != Place::Table {
            continue;
        }
        let mut stack = vec![b.clone()];
        let mut cur = b.as_str();
        while let Some(next) = above.get(cur) {
            stack.push(next.to_string());
            cur = next;
        }
        placed += stack.len();
        stacks.push(stack);
    }
    if placed + held.len() != place.len() {
        return Err(DomainError::Inconsistent("some blocks do not rest on the table (cycle)".into()));
    }
    for b in &clear {
        if above.contains_key(b.as_str()) || place.get(b) == Some(&Place::Hand) {
            return Err(DomainError::Inconsistent(format!("{b} is stated clear but is not")));
        }
    }
    BlocksState::new(stacks, held.first().map(|s| s.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1_INIT: &str = "the red block is clear, the yellow block is clear, the hand is empty, the red block is on top of the blue block, the yellow block is on top of the orange block, the blue block is on the table and the orange block is on the table";
    const EX1_GOAL: &str = "the orange block is clear, the yellow block is clear, the hand is empty, the orange block is on top of the red block, the red block is on top of the blue block, the blue block is on the table, and the yellow block is on the table.";
    const EX2_INIT: &str = "the blue block is clear, the orange block is in the hand, the red block is clear, the yellow block is clear, the hand is holding the orange block, the blue block is on the table, the red block is on the table, and the yellow block is on the table.";

    fn s(v: &[&[&str]], h: Option<&str>) -> BlocksState {
        BlocksState::new(
            v.iter().map(|st| st.iter().map(|x| x.to_string()).collect()).collect(),
            h.map(str::to_string),
        )
        .unwrap()
    }

    #[test]
    fn parses_single_block() {
        let st = BlocksState::parse("the red block is clear, the hand is empty, the red block is on the table").unwrap();
        assert_eq!(st, s(&[&["red"]], None));
        assert_eq!(st.render(), "the red block is clear, the hand is empty, and the red block is on the table");
    }

    #[test]
    fn parses_prompt_examples() {
        let st = BlocksState::parse(EX1_INIT).unwrap();
        assert_eq!(st.stacks(), &[vec!["blue".to_string(), "red".into()], vec!["orange".into(), "yellow".into()]]);
        assert_eq!(st.holding(), None);
        let st2 = BlocksState::parse(EX2_INIT).unwrap();
        assert_eq!(st2, s(&[&["blue"], &["red"], &["yellow"]], Some("orange")));
        for st in [st, st2] {
            assert_eq!(BlocksState::parse(&st.render()).unwrap(), st);
        }
    }

    #[test]
    fn case_insensitive_names() {
        let st = BlocksState::parse("The RED block is clear, the hand is empty, the Red block is on the table").unwrap();
        assert_eq!(st, s(&[&["red"]], None));
    }

    #[test]
    fn parse_errors() {
        match BlocksState::parse("the red block is clear, the red block is flying") {
            Err(DomainError::Parse { span, .. }) => assert_eq!(span, 24..47),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            BlocksState::parse("the red block is in the hand, the red block is on the table"),
            Err(DomainError::Inconsistent(_))
        ));
        assert!(matches!(
            BlocksState::parse("the hand is empty, the hand is holding the red block"),
            Err(DomainError::Inconsistent(_))
        ));
        assert!(matches!(
            BlocksState::parse("the a block is on top of the b block, the b block is on top of the a block"),
            Err(DomainError::Inconsistent(_))
        ));
    }

    #[test]
    fn holding_actions() {
        let st = s(&[&["blue"], &["red"], &["yellow"]], Some("orange"));
        let acts = st.actions();
        assert_eq!(
            acts,
            vec![
                BwAction::putdown("orange"),
                BwAction::stack("orange", "blue"),
                BwAction::stack("orange", "red"),
                BwAction::stack("orange", "yellow"),
            ]
        );
        let after = st.apply(&BwAction::stack("orange", "red")).unwrap();
        assert_eq!(after.position("orange"), Some((Support::Block("red".into()), 1)));
    }

    #[test]
    fn single_stack_and_empty_world() {
        let st = s(&[&["a", "b"]], None);
        assert_eq!(st.actions(), vec![BwAction::unstack("b", "a")]);
        assert!(s(&[], None).actions().is_empty());
    }

    #[test]
    fn apply_effects_and_errors() {
        let st = s(&[&["red"]], None);
        let held = st.apply(&BwAction::pickup("red")).unwrap();
        assert_eq!(held, s(&[], Some("red")));
        let err = st.apply(&BwAction::putdown("red")).unwrap_err();
        assert!(err.to_string().contains("not holding"), "{err}");
        let tower = s(&[&["a", "b"], &["c"]], None);
        let back = tower
            .apply(&BwAction::unstack("b", "a"))
            .unwrap()
            .apply(&BwAction::stack("b", "a"))
            .unwrap();
        assert_eq!(back, tower);
    }

    #[test]
    fn goals() {
        let goal = BwGoal::parse(EX1_GOAL).unwrap();
        let goal_state = s(&[&["blue", "red", "orange"], &["yellow"]], None);
        assert!(goal.is_satisfied(&goal_state));
        assert!(!goal.is_satisfied(&BlocksState::parse(EX1_INIT).unwrap()));
        assert!(BwGoal::default().is_satisfied(&goal_state));
        assert_eq!(goal.height("orange"), 2);
        assert_eq!(BwGoal::parse(&goal.render()).unwrap(), goal);
    }

    #[test]
    fn goal_naming_the_held_block() {
        let held = s(&[&["blue"]], Some("red"));
        let goal = BwGoal::from_state(&held);
        assert_eq!(goal.required_holding.as_deref(), Some("red"));
        assert_eq!(BwGoal::parse(&goal.render()).unwrap(), goal);
        assert!(goal.is_satisfied(&held));
        assert!(!goal.is_satisfied(&s(&[&["blue"]], Some("green"))));
        assert!(BwGoal::parse("the hand is holding the red block, the hand is holding the blue block").is_err());
    }

    #[test]
    fn action_phrases_round_trip() {
        for a in [
            BwAction::pickup("red"),
            BwAction::putdown("red"),
            BwAction::stack("red", "blue"),
            BwAction::unstack("red", "blue"),
        ] {
            assert_eq!(BwAction::parse(&a.to_string()), Some(a.clone()));
        }
        assert_eq!(
            BwAction::parse("1. Unstack the red block from on top of the blue block."),
            Some(BwAction::unstack("red", "blue"))
        );
    }
}
