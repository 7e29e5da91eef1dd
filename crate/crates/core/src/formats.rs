//! JSON data files.
//!
//! Facet indices are 0-based and colours 1-based. Rationals are written as
//! `[numerator, denominator]` pairs so files stay exact.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::characters::{Character, Gram};
use crate::error::{Error, Result};
use crate::game::{Moves, State, Status};
use crate::polytope::{Colouring, IdealVertex, Polytope};

/// Version of the file formats below.
pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealVertexFile {
    pub pairs: Vec<[u32; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub num_facets: usize,
    pub adjacency: Vec<[u32; 2]>,
    pub finite_vertices: Vec<Vec<u32>>,
    pub ideal_vertices: Vec<IdealVertexFile>,
}

impl From<&Polytope> for PolytopeFile {
    fn from(p: &Polytope) -> Self {
        Self {
            dim: p.dim(),
            num_facets: p.num_facets(),
            adjacency: p.adjacent_pairs().map(|(a, b)| [a, b]).collect(),
            finite_vertices: p.finite_vertices().to_vec(),
            ideal_vertices: p
                .ideal_vertices()
                .iter()
                .map(|v| IdealVertexFile { pairs: v.pairs.clone() })
                .collect(),
        }
    }
}

impl TryFrom<PolytopeFile> for Polytope {
    type Error = Error;

    fn try_from(f: PolytopeFile) -> Result<Self> {
        Polytope::new(
            f.dim,
            f.num_facets,
            f.adjacency.into_iter().map(|[a, b]| (a, b)).collect(),
            f.finite_vertices,
            f.ideal_vertices
                .into_iter()
                .map(|v| IdealVertex { pairs: v.pairs })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringFile {
    pub palette: usize,
    pub colours: Vec<u32>,
}

impl From<&Colouring> for ColouringFile {
    fn from(c: &Colouring) -> Self {
        Self {
            palette: c.palette(),
            colours: c.colours().to_vec(),
        }
    }
}

impl From<ColouringFile> for Colouring {
    fn from(f: ColouringFile) -> Self {
        Colouring::new(f.palette, f.colours)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateFile {
    pub stati: Vec<Status>,
}

impl From<&State> for StateFile {
    fn from(s: &State) -> Self {
        Self {
            stati: s.stati().to_vec(),
        }
    }
}

impl From<StateFile> for State {
    fn from(f: StateFile) -> Self {
        State::new(f.stati)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovesFile {
    pub blocks: Vec<Vec<u32>>,
}

impl From<&Moves> for MovesFile {
    fn from(m: &Moves) -> Self {
        Self {
            blocks: m.blocks().to_vec(),
        }
    }
}

impl MovesFile {
    pub fn into_moves(self, palette: usize) -> Result<Moves> {
        Moves::new(palette, self.blocks)
    }
}

/// Facet permutations, each listing the image of facet `0, 1, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetriesFile {
    pub symmetries: Vec<Vec<u32>>,
}

pub type RationalPair = [i64; 2];

pub fn rational_to_pair(x: &BigRational) -> Result<RationalPair> {
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(n), Some(d)) => Ok([n, d]),
        _ => Err(Error::Input(format!("rational {x} does not fit in 64 bits"))),
    }
}

pub fn pair_to_rational([n, d]: RationalPair) -> Result<BigRational> {
    if d == 0 {
        return Err(Error::Input("zero denominator".into()));
    }
    Ok(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// Values of a character on the loops of each cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterFile {
    pub cusps: Vec<Vec<RationalPair>>,
}

impl CharacterFile {
    pub fn from_character(c: &Character) -> Result<Self> {
        Ok(Self {
            cusps: c
                .values
                .iter()
                .map(|v| v.iter().map(rational_to_pair).collect())
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_character(&self) -> Result<Character> {
        Ok(Character::new(
            self.cusps
                .iter()
                .map(|v| v.iter().map(|&p| pair_to_rational(p)).collect())
                .collect::<Result<_>>()?,
        ))
    }
}

/// One Gram matrix per cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramFile {
    pub cusps: Vec<Vec<Vec<RationalPair>>>,
}

impl GramFile {
    pub fn from_grams(grams: &[Gram]) -> Result<Self> {
        Ok(Self {
            cusps: grams
                .iter()
                .map(|g| {
                    g.entries()
                        .iter()
                        .map(|row| row.iter().map(rational_to_pair).collect())
                        .collect()
                })
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_grams(&self) -> Result<Vec<Gram>> {
        self.cusps
            .iter()
            .map(|m| {
                Gram::new(
                    m.iter()
                        .map(|row| row.iter().map(|&p| pair_to_rational(p)).collect())
                        .collect::<Result<_>>()?,
                )
            })
            .collect()
    }
}

/// Characters whose values on every loop are zero.
pub fn is_zero_character(c: &Character) -> bool {
    c.values.iter().flatten().all(Zero::is_zero)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path.as_ref())?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polytope_round_trip() {
        for p in [Polytope::square(), Polytope::cube(), Polytope::ideal_polygon(4)] {
            let f = PolytopeFile::from(&p);
            let text = serde_json::to_string(&f).unwrap();
            let back: PolytopeFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(Polytope::try_from(back).unwrap(), p);
        }
    }

    #[test]
    fn state_uses_letters() {
        let s = State::new(vec![Status::I, Status::O]);
        assert_eq!(
            serde_json::to_string(&StateFile::from(&s)).unwrap(),
            r#"{"stati":["I","O"]}"#
        );
    }

    #[test]
    fn gram_round_trip() {
        let g = Gram::diagonal(&[4, 16]);
        let f = GramFile::from_grams(std::slice::from_ref(&g)).unwrap();
        assert_eq!(f.cusps[0][0][0], [4, 1]);
        assert_eq!(f.to_grams().unwrap(), vec![g]);
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let f = CharacterFile {
            cusps: vec![vec![[1, 0]]],
        };
        assert!(f.to_character().is_err());
    }
}
