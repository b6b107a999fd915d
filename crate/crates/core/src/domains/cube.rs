//! 2x2 pocket cube as a 24-facelet array.
//!
//! Facelets are grouped four per face in the order Upper, Right, Front,
//! Down, Left, Back. Within a face the stickers are listed row-major as
//! seen from outside the cube: U with B at the top edge, D with F at the
//! top edge, and the four side faces with U at the top edge.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DomainError;

pub const FACELETS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    U,
    R,
    F,
    D,
    L,
    B,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::U, Face::R, Face::F, Face::D, Face::L, Face::B];

    fn index(self) -> usize {
        self as usize
    }

    fn letter(self) -> char {
        match self {
            Face::U => 'U',
            Face::R => 'R',
            Face::F => 'F',
            Face::D => 'D',
            Face::L => 'L',
            Face::B => 'B',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Turn {
    Cw90,
    Ccw90,
    Half,
}

impl Turn {
    pub const ALL: [Turn; 3] = [Turn::Cw90, Turn::Ccw90, Turn::Half];

    fn quarter_turns(self) -> usize {
        match self {
            Turn::Cw90 => 1,
            Turn::Half => 2,
            Turn::Ccw90 => 3,
        }
    }

    pub fn inverse(self) -> Turn {
        match self {
            Turn::Cw90 => Turn::Ccw90,
            Turn::Ccw90 => Turn::Cw90,
            Turn::Half => Turn::Half,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeMove {
    pub face: Face,
    pub turn: Turn,
}

impl CubeMove {
    pub fn new(face: Face, turn: Turn) -> Self {
        Self { face, turn }
    }

    pub fn inverse(self) -> Self {
        Self::new(self.face, self.turn.inverse())
    }

    /// Parses standard notation: `U`, `U'`, `U2`.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        let mut chars = text.chars();
        let face = match chars.next()?.to_ascii_uppercase() {
            'U' => Face::U,
            'R' => Face::R,
            'F' => Face::F,
            'D' => Face::D,
            'L' => Face::L,
            'B' => Face::B,
            _ => return None,
        };
        let turn = match chars.as_str() {
            "" => Turn::Cw90,
            "'" => Turn::Ccw90,
            "2" => Turn::Half,
            _ => return None,
        };
        Some(Self::new(face, turn))
    }
}

impl fmt::Display for CubeMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = match self.turn {
            Turn::Cw90 => "",
            Turn::Ccw90 => "'",
            Turn::Half => "2",
        };
        write!(f, "{}{}", self.face.letter(), suffix)
    }
}

/// Which faces may be turned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveSet {
    /// All six faces, three turns each.
    #[default]
    Full,
    /// U, R and F only; the DBL corner never moves.
    Reduced,
}

impl MoveSet {
    pub fn faces(self) -> &'static [Face] {
        match self {
            MoveSet::Full => &Face::ALL,
            MoveSet::Reduced => &[Face::U, Face::R, Face::F],
        }
    }

    pub fn moves(self) -> Vec<CubeMove> {
        self.faces()
            .iter()
            .flat_map(|&face| Turn::ALL.iter().map(move |&turn| CubeMove::new(face, turn)))
            .collect()
    }

    pub fn contains(self, mv: CubeMove) -> bool {
        self.faces().contains(&mv.face)
    }
}

// Clockwise quarter turns: new[i] = old[QUARTER[face][i]].
const QUARTER: [[u8; FACELETS]; 6] = [
    // U
    [2, 0, 3, 1, 20, 21, 6, 7, 4, 5, 10, 11, 12, 13, 14, 15, 8, 9, 18, 19, 16, 17, 22, 23],
    // R
    [0, 9, 2, 11, 6, 4, 7, 5, 8, 13, 10, 15, 12, 22, 14, 20, 16, 17, 18, 19, 3, 21, 1, 23],
    // F
    [0, 1, 19, 17, 2, 5, 3, 7, 10, 8, 11, 9, 6, 4, 14, 15, 16, 12, 18, 13, 20, 21, 22, 23],
    // D
    [0, 1, 2, 3, 4, 5, 10, 11, 8, 9, 18, 19, 14, 12, 15, 13, 16, 17, 22, 23, 20, 21, 6, 7],
    // L
    [23, 1, 21, 3, 4, 5, 6, 7, 0, 9, 2, 11, 8, 13, 10, 15, 18, 16, 19, 17, 20, 14, 22, 12],
    // B
    [5, 7, 2, 3, 4, 15, 6, 14, 8, 9, 10, 11, 12, 13, 16, 18, 1, 17, 0, 19, 22, 20, 23, 21],
];

/// Facelet permutation for a clockwise quarter turn of `face`.
pub fn quarter_turn_permutation(face: Face) -> [u8; FACELETS] {
    QUARTER[face.index()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct CubeState([u8; FACELETS]);

impl CubeState {
    pub fn solved() -> Self {
        let mut facelets = [0u8; FACELETS];
        for (i, f) in facelets.iter_mut().enumerate() {
            *f = (i / 4) as u8;
        }
        Self(facelets)
    }

    /// Validates color range and the four-of-each-color count.
    pub fn new(facelets: [u8; FACELETS]) -> Result<Self, DomainError> {
        let mut counts = [0usize; 6];
        for &c in &facelets {
            if c > 5 {
                return Err(DomainError::InvalidState(format!("color code {c} is outside 0..=5")));
            }
            counts[c as usize] += 1;
        }
        if let Some(color) = counts.iter().position(|&n| n != 4) {
            return Err(DomainError::InvalidState(format!(
                "color {color} appears {} times, expected 4",
                counts[color]
            )));
        }
        Ok(Self(facelets))
    }

    pub fn from_slice(facelets: &[u8]) -> Result<Self, DomainError> {
        let arr: [u8; FACELETS] = facelets.try_into().map_err(|_| {
            DomainError::InvalidState(format!("expected 24 facelets, got {}", facelets.len()))
        })?;
        Self::new(arr)
    }

    pub fn facelets(&self) -> &[u8; FACELETS] {
        &self.0
    }

    pub fn face(&self, face: Face) -> [u8; 4] {
        let i = face.index() * 4;
        [self.0[i], self.0[i + 1], self.0[i + 2], self.0[i + 3]]
    }

    fn permute(&self, perm: &[u8; FACELETS]) -> Self {
        let mut out = [0u8; FACELETS];
        for (dst, &src) in out.iter_mut().zip(perm.iter()) {
            *dst = self.0[src as usize];
        }
        Self(out)
    }

    pub fn apply(&self, mv: CubeMove) -> Self {
        let perm = &QUARTER[mv.face.index()];
        let mut s = *self;
        for _ in 0..mv.turn.quarter_turns() {
            s = s.permute(perm);
        }
        s
    }

    pub fn uniform_faces(&self) -> usize {
        Face::ALL
            .iter()
            .filter(|&&f| {
                let q = self.face(f);
                q.iter().all(|&c| c == q[0])
            })
            .count()
    }

    /// Every face monochromatic; which color sits on which face is irrelevant.
    pub fn is_solved(&self) -> bool {
        self.uniform_faces() == 6
    }

    pub fn key(&self) -> String {
        self.0.iter().map(|&c| char::from(b'0' + c)).collect()
    }
}

impl TryFrom<Vec<u8>> for CubeState {
    type Error = DomainError;

    fn try_from(v: Vec<u8>) -> Result<Self, Self::Error> {
        Self::from_slice(&v)
    }
}

impl From<CubeState> for Vec<u8> {
    fn from(s: CubeState) -> Self {
        s.0.to_vec()
    }
}

impl fmt::Display for CubeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Applies `depth` random moves to the solved cube. Consecutive moves never
/// share a face, so no move cancels or merges with its predecessor.
pub fn scramble(
    depth: usize,
    seed: u64,
    move_set: MoveSet,
) -> Result<(CubeState, Vec<CubeMove>), DomainError> {
    if depth == 0 {
        return Err(DomainError::Precondition("scramble depth must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moves = move_set.moves();
    let mut state = CubeState::solved();
    let mut applied: Vec<CubeMove> = Vec::with_capacity(depth);
    while applied.len() < depth {
        let mv = moves[rng.random_range(0..moves.len())];
        if applied.last().is_some_and(|prev| prev.face == mv.face) {
            continue;
        }
        state = state.apply(mv);
        applied.push(mv);
    }
    Ok((state, applied))
}
