use serde::Serialize;

use super::lattice::Gram;
use crate::cubulation::CubeComplex;
use crate::error::{Error, Result};
use crate::game::{classify_all, status_at, Moves, State, Status};
use crate::polytope::{Colouring, Polytope};
use crate::unionfind::UnionFind;

/// One edge traversal: leave vertex `from` across the edge dual to `facet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LoopStep {
    pub from: u64,
    pub facet: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspLoop {
    pub pair: [u32; 2],
    pub steps: Vec<LoopStep>,
}

impl CuspLoop {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Generators of the homology of one cusp section.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspTorus {
    pub ideal_vertex: usize,
    pub base: u64,
    pub loops: Vec<CuspLoop>,
}

impl CuspTorus {
    pub fn rank(&self) -> usize {
        self.loops.len()
    }

    /// Flat metric with unit edges and orthogonal loops: `diag(len_i^2)`.
    pub fn default_gram(&self) -> Gram {
        Gram::diagonal(
            &self
                .loops
                .iter()
                .map(|l| (l.len() * l.len()) as i64)
                .collect::<Vec<_>>(),
        )
    }
}

/// The loops of the cusp above `vertex` through the cube-complex vertex
/// `base`: for each opposite pair, alternate the two dual edges until the
/// walk closes up.
pub fn cusp_loops(polytope: &Polytope, colouring: &Colouring, vertex: usize, base: u64) -> Result<CuspTorus> {
    let iv = polytope.ideal_vertex(vertex)?;
    let mut loops = Vec::with_capacity(iv.pairs.len());
    for &pair in &iv.pairs {
        let mut steps = Vec::with_capacity(4);
        let mut cur = base;
        for i in 0..4 {
            let facet = pair[i % 2];
            steps.push(LoopStep { from: cur, facet });
            cur ^= colouring.bit(facet);
            if cur == base {
                break;
            }
        }
        if cur != base {
            return Err(Error::LoopNotClosed(pair[0], pair[1]));
        }
        loops.push(CuspLoop { pair, steps });
    }
    Ok(CuspTorus {
        ideal_vertex: vertex,
        base,
        loops,
    })
}

/// An integer 1-cochain on the cube complex, read along traversals.
pub trait EdgeCochain {
    /// Value on the edge dual to `facet` at `from`, traversed away from `from`.
    fn edge_value(&self, from: u64, facet: u32) -> i64;
}

/// The cocycle taking the value 1 on every edge in its orientation.
#[derive(Clone, Copy, Debug)]
pub struct UnitCocycle<'a> {
    colouring: &'a Colouring,
    state: &'a State,
    moves: &'a Moves,
}

impl<'a> UnitCocycle<'a> {
    /// Fails if some adjacent pair is bad, since the cochain is then not closed.
    pub fn new(polytope: &Polytope, colouring: &'a Colouring, state: &'a State, moves: &'a Moves) -> Result<Self> {
        let report = classify_all(polytope, colouring, state, moves);
        if let Some(&(a, b)) = report.bad_pairs.first() {
            return Err(Error::BadPairPresent(a, b));
        }
        Ok(Self {
            colouring,
            state,
            moves,
        })
    }
}

impl EdgeCochain for UnitCocycle<'_> {
    fn edge_value(&self, from: u64, facet: u32) -> i64 {
        // the edge points away from `from` exactly when the facet reads O there
        match status_at(self.colouring, self.state, self.moves, from, facet) {
            Status::O => 1,
            Status::I => -1,
        }
    }
}

/// A cochain given by its values on edges in canonical direction.
#[derive(Clone, Copy, Debug)]
pub struct TabulatedCochain<'a> {
    complex: &'a CubeComplex,
    values: &'a [i64],
}

impl<'a> TabulatedCochain<'a> {
    pub fn new(complex: &'a CubeComplex, values: &'a [i64]) -> Result<Self> {
        if values.len() != complex.num_cells(1) {
            return Err(Error::Shape(format!(
                "cochain has {} entries, complex has {} edges",
                values.len(),
                complex.num_cells(1)
            )));
        }
        Ok(Self { complex, values })
    }
}

impl EdgeCochain for TabulatedCochain<'_> {
    fn edge_value(&self, from: u64, facet: u32) -> i64 {
        let (e, forward) = self.complex.edge_at(from, facet);
        if forward {
            self.values[e]
        } else {
            -self.values[e]
        }
    }
}

pub fn evaluate(cochain: &impl EdgeCochain, lp: &CuspLoop) -> i64 {
    lp.steps.iter().map(|s| cochain.edge_value(s.from, s.facet)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairCondition {
    /// The two facets share a colour.
    Cond1,
    /// The two facets lie in distinct components of the union of their colour classes.
    Cond2,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Surjectivity {
    Surjective,
    NonTrivial,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurjectivityReport {
    pub ideal_vertex: usize,
    pub conditions: Vec<PairCondition>,
    pub verdict: Surjectivity,
}

/// Components of the subgraph spanned by the facets of two colours.
fn colour_pair_components(polytope: &Polytope, colouring: &Colouring, c1: u32, c2: u32) -> UnionFind {
    let mut uf = UnionFind::new(polytope.num_facets());
    for f in 0..polytope.num_facets() as u32 {
        let cf = colouring.colour(f);
        if cf != c1 && cf != c2 {
            continue;
        }
        for &g in polytope.neighbours(f) {
            let cg = colouring.colour(g);
            if g > f && (cg == c1 || cg == c2) {
                uf.union(f as usize, g as usize);
            }
        }
    }
    uf
}

fn pair_condition(polytope: &Polytope, colouring: &Colouring, pair: [u32; 2]) -> PairCondition {
    let (c1, c2) = (colouring.colour(pair[0]), colouring.colour(pair[1]));
    if c1 == c2 {
        PairCondition::Cond1
    } else if !colour_pair_components(polytope, colouring, c1, c2).same(pair[0] as usize, pair[1] as usize) {
        PairCondition::Cond2
    } else {
        PairCondition::None
    }
}

pub fn surjectivity_conditions(
    polytope: &Polytope,
    colouring: &Colouring,
    vertex: usize,
) -> Result<SurjectivityReport> {
    let iv = polytope.ideal_vertex(vertex)?;
    let conditions: Vec<PairCondition> = iv
        .pairs
        .iter()
        .map(|&p| pair_condition(polytope, colouring, p))
        .collect();
    let hits = conditions.iter().filter(|&&c| c != PairCondition::None).count();
    let verdict = if hits == conditions.len() && hits > 0 {
        Surjectivity::Surjective
    } else if hits > 0 {
        Surjectivity::NonTrivial
    } else {
        Surjectivity::Inconclusive
    };
    Ok(SurjectivityReport {
        ideal_vertex: vertex,
        conditions,
        verdict,
    })
}

/// A state and moves whose unit cocycle detects one loop of a cusp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseConstruction {
    pub pair: usize,
    pub condition: PairCondition,
    pub state: State,
    pub moves: Moves,
}

/// Same-colour pair: the first facet is `O`, every other facet `I`, moves discrete.
pub fn case_one(polytope: &Polytope, colouring: &Colouring, vertex: usize, pair: usize) -> Result<CaseConstruction> {
    let [f1, f2] = pair_at(polytope, vertex, pair)?;
    if colouring.colour(f1) != colouring.colour(f2) {
        return Err(Error::Input(format!("facets {f1} and {f2} have distinct colours")));
    }
    let mut state = State::uniform(polytope.num_facets(), Status::I);
    state.set(f1, Status::O);
    Ok(CaseConstruction {
        pair,
        condition: PairCondition::Cond1,
        state,
        moves: Moves::discrete(colouring.palette()),
    })
}

/// Pair separated in its two-colour subgraph: the component of the first
/// facet is `O`, every other facet `I`, and the two colours form one move.
pub fn case_two(polytope: &Polytope, colouring: &Colouring, vertex: usize, pair: usize) -> Result<CaseConstruction> {
    let [f1, f2] = pair_at(polytope, vertex, pair)?;
    let (c1, c2) = (colouring.colour(f1), colouring.colour(f2));
    if c1 == c2 {
        return Err(Error::Input(format!("facets {f1} and {f2} share a colour")));
    }
    let mut uf = colour_pair_components(polytope, colouring, c1, c2);
    if uf.same(f1 as usize, f2 as usize) {
        return Err(Error::Input(format!("facets {f1} and {f2} are in one component")));
    }
    let mut state = State::uniform(polytope.num_facets(), Status::I);
    for g in 0..polytope.num_facets() as u32 {
        if uf.same(f1 as usize, g as usize) {
            state.set(g, Status::O);
        }
    }
    let mut blocks = vec![vec![c1.min(c2), c1.max(c2)]];
    blocks.extend(
        (1..=colouring.palette() as u32)
            .filter(|&c| c != c1 && c != c2)
            .map(|c| vec![c]),
    );
    Ok(CaseConstruction {
        pair,
        condition: PairCondition::Cond2,
        state,
        moves: Moves::new(colouring.palette(), blocks)?,
    })
}

fn pair_at(polytope: &Polytope, vertex: usize, pair: usize) -> Result<[u32; 2]> {
    let iv = polytope.ideal_vertex(vertex)?;
    iv.pairs
        .get(pair)
        .copied()
        .ok_or_else(|| Error::Input(format!("ideal vertex {vertex} has no pair {pair}")))
}

/// Row `j` holds the values on the cusp loops of the cocycle constructed
/// for pair `j`, or `None` when neither condition holds for that pair.
pub fn iota_star_matrix(
    polytope: &Polytope,
    colouring: &Colouring,
    vertex: usize,
    base: u64,
) -> Result<Vec<Option<Vec<i64>>>> {
    let torus = cusp_loops(polytope, colouring, vertex, base)?;
    let report = surjectivity_conditions(polytope, colouring, vertex)?;
    report
        .conditions
        .iter()
        .enumerate()
        .map(|(j, cond)| {
            let case = match cond {
                PairCondition::Cond1 => case_one(polytope, colouring, vertex, j)?,
                PairCondition::Cond2 => case_two(polytope, colouring, vertex, j)?,
                PairCondition::None => return Ok(None),
            };
            let z = UnitCocycle::new(polytope, colouring, &case.state, &case.moves)?;
            Ok(Some(torus.loops.iter().map(|l| evaluate(&z, l)).collect()))
        })
        .collect()
}
