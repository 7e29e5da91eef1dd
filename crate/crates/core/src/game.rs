//! States, moves, and the classification of adjacent facet pairs.
//!
//! Vertices of the dual cubulation are elements of `Z_2^c`, stored as `u64`
//! bit vectors (bit `i - 1` for colour `i`). The status of facet `F` seen
//! from vertex `v` is the base status flipped once for every coordinate of
//! `v` lying in the move that contains the colour of `F`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{Colouring, Polytope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    I,
    O,
}

impl Status {
    pub fn flipped(self) -> Self {
        match self {
            Status::I => Status::O,
            Status::O => Status::I,
        }
    }

    fn flip_if(self, parity: bool) -> Self {
        if parity {
            self.flipped()
        } else {
            self
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::I => "I",
            Status::O => "O",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    stati: Vec<Status>,
}

impl State {
    pub fn new(stati: Vec<Status>) -> Self {
        Self { stati }
    }

    pub fn uniform(num_facets: usize, status: Status) -> Self {
        Self::new(vec![status; num_facets])
    }

    #[inline]
    pub fn status(&self, facet: u32) -> Status {
        self.stati[facet as usize]
    }

    pub fn stati(&self) -> &[Status] {
        &self.stati
    }

    pub fn set(&mut self, facet: u32, status: Status) {
        self.stati[facet as usize] = status;
    }

    pub fn flipped(&self) -> Self {
        Self::new(self.stati.iter().map(|s| s.flipped()).collect())
    }

    /// Every colour class has as many `I` facets as `O` facets.
    pub fn is_balanced(&self, colouring: &Colouring) -> bool {
        let mut balance = vec![0i64; colouring.palette()];
        for (f, s) in self.stati.iter().enumerate() {
            let c = colouring.colour(f as u32) as usize - 1;
            balance[c] += if *s == Status::O { 1 } else { -1 };
        }
        balance.iter().all(|&b| b == 0)
    }
}

/// A partition of the palette into moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moves {
    blocks: Vec<Vec<u32>>,
    /// For colour `i`, the bit mask of colours in the same move.
    block_mask: Vec<u64>,
    block_of: Vec<usize>,
}

impl Moves {
    pub fn new(palette: usize, blocks: Vec<Vec<u32>>) -> Result<Self> {
        if palette > 64 {
            return Err(Error::PaletteTooLarge(palette, 64));
        }
        let mut block_of = vec![usize::MAX; palette + 1];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Input(format!("move {b} is empty")));
            }
            for &c in block {
                if c == 0 || c as usize > palette {
                    return Err(Error::Input(format!("colour {c} outside palette 1..={palette}")));
                }
                if block_of[c as usize] != usize::MAX {
                    return Err(Error::Input(format!("colour {c} appears in two moves")));
                }
                block_of[c as usize] = b;
            }
        }
        if let Some(c) = (1..=palette).find(|&c| block_of[c] == usize::MAX) {
            return Err(Error::Input(format!("colour {c} is in no move")));
        }
        let masks: Vec<u64> = blocks
            .iter()
            .map(|block| block.iter().fold(0u64, |m, &c| m | 1 << (c - 1)))
            .collect();
        let mut block_mask = vec![0u64; palette + 1];
        for c in 1..=palette {
            block_mask[c] = masks[block_of[c]];
        }
        Ok(Self {
            blocks,
            block_mask,
            block_of,
        })
    }

    pub fn discrete(palette: usize) -> Self {
        Self::new(palette, (1..=palette as u32).map(|c| vec![c]).collect()).expect("discrete partition is valid")
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn palette(&self) -> usize {
        self.block_of.len() - 1
    }

    pub fn same_move(&self, a: u32, b: u32) -> bool {
        self.block_of[a as usize] == self.block_of[b as usize]
    }

    #[inline]
    pub fn block_mask(&self, colour: u32) -> u64 {
        self.block_mask[colour as usize]
    }
}

/// Status of `facet` as seen from the cubulation vertex `v`.
#[inline]
pub fn status_at(colouring: &Colouring, state: &State, moves: &Moves, v: u64, facet: u32) -> Status {
    let mask = moves.block_mask(colouring.colour(facet));
    state.status(facet).flip_if((v & mask).count_ones() % 2 == 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PairClass {
    VeryGood,
    Good,
    Bad,
}

pub fn classify_pair(
    polytope: &Polytope,
    colouring: &Colouring,
    state: &State,
    moves: &Moves,
    a: u32,
    b: u32,
) -> Result<PairClass> {
    if !polytope.is_adjacent(a, b) {
        return Err(Error::NotAdjacent(a, b));
    }
    Ok(classify_adjacent(colouring, state, moves, a, b))
}

fn classify_adjacent(colouring: &Colouring, state: &State, moves: &Moves, a: u32, b: u32) -> PairClass {
    if !moves.same_move(colouring.colour(a), colouring.colour(b)) {
        PairClass::VeryGood
    } else if state.status(a) == state.status(b) {
        PairClass::Good
    } else {
        PairClass::Bad
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GameReport {
    pub very_good: usize,
    pub good: usize,
    pub bad: usize,
    pub bad_pairs: Vec<(u32, u32)>,
    /// Every pair is very good: the diagonal Morse function exists.
    pub coherent: bool,
    /// No pair is bad: the unit edge assignment is a 1-cocycle.
    pub cocycle_ok: bool,
}

pub fn classify_all(polytope: &Polytope, colouring: &Colouring, state: &State, moves: &Moves) -> GameReport {
    let mut report = GameReport::default();
    for (a, b) in polytope.adjacent_pairs() {
        match classify_adjacent(colouring, state, moves, a, b) {
            PairClass::VeryGood => report.very_good += 1,
            PairClass::Good => report.good += 1,
            PairClass::Bad => {
                report.bad += 1;
                report.bad_pairs.push((a, b));
            }
        }
    }
    report.coherent = report.good == 0 && report.bad == 0;
    report.cocycle_ok = report.bad == 0;
    report
}
