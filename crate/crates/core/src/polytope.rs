//! Combinatorial finite-volume right-angled polytopes and their colourings.
//!
//! A polytope is recorded through its facets, the facet adjacency relation
//! (pairs of facets meeting in a codimension-2 face), the facet sets of its
//! finite vertices, and for each ideal vertex the opposite facet pairs of the
//! Euclidean cube that links it.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealVertex {
    pub pairs: Vec<[u32; 2]>,
}

impl IdealVertex {
    pub fn facets(&self) -> impl Iterator<Item = u32> + '_ {
        self.pairs.iter().flat_map(|p| p.iter().copied())
    }

    /// Index of the opposite pair containing `facet`, if any.
    pub fn pair_of(&self, facet: u32) -> Option<usize> {
        self.pairs.iter().position(|p| p.contains(&facet))
    }
}

#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    num_facets: usize,
    adjacency_pairs: Vec<(u32, u32)>,
    neighbours: Vec<Vec<u32>>,
    finite_vertices: Vec<Vec<u32>>,
    ideal_vertices: Vec<IdealVertex>,
    facet_finite: Vec<Vec<u32>>,
    facet_ideal: Vec<Vec<u32>>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.num_facets == other.num_facets
            && self.neighbours == other.neighbours
            && self.finite_vertices == other.finite_vertices
            && self.ideal_vertices == other.ideal_vertices
    }
}

impl Polytope {
    /// Builds the polytope record. Only index ranges are checked here; the
    /// geometric invariants are checked by [`Polytope::validate`].
    pub fn new(
        dim: usize,
        num_facets: usize,
        adjacency: Vec<(u32, u32)>,
        finite_vertices: Vec<Vec<u32>>,
        ideal_vertices: Vec<IdealVertex>,
    ) -> Result<Self> {
        let check = |f: u32| -> Result<()> {
            if (f as usize) < num_facets {
                Ok(())
            } else {
                Err(Error::FacetOutOfRange {
                    index: f as usize,
                    num_facets,
                })
            }
        };
        let mut neighbours = vec![Vec::new(); num_facets];
        for &(a, b) in &adjacency {
            check(a)?;
            check(b)?;
            neighbours[a as usize].push(b);
            neighbours[b as usize].push(a);
        }
        for list in &mut neighbours {
            list.sort_unstable();
            list.dedup();
        }
        let mut facet_finite = vec![Vec::new(); num_facets];
        let finite_vertices: Vec<Vec<u32>> = finite_vertices
            .into_iter()
            .map(|mut fs| {
                fs.sort_unstable();
                fs
            })
            .collect();
        for (w, fs) in finite_vertices.iter().enumerate() {
            for &f in fs {
                check(f)?;
                facet_finite[f as usize].push(w as u32);
            }
        }
        let mut facet_ideal = vec![Vec::new(); num_facets];
        for (v, iv) in ideal_vertices.iter().enumerate() {
            for f in iv.facets() {
                check(f)?;
                facet_ideal[f as usize].push(v as u32);
            }
        }
        for lists in [&mut facet_finite, &mut facet_ideal] {
            for l in lists.iter_mut() {
                l.dedup();
            }
        }
        Ok(Self {
            dim,
            num_facets,
            adjacency_pairs: adjacency,
            neighbours,
            finite_vertices,
            ideal_vertices,
            facet_finite,
            facet_ideal,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.num_facets
    }

    pub fn neighbours(&self, facet: u32) -> &[u32] {
        &self.neighbours[facet as usize]
    }

    pub fn is_adjacent(&self, a: u32, b: u32) -> bool {
        self.neighbours[a as usize].binary_search(&b).is_ok()
    }

    /// Adjacent pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn adjacent_pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.neighbours.iter().enumerate().flat_map(|(a, ns)| {
            let a = a as u32;
            ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b))
        })
    }

    pub fn num_adjacent_pairs(&self) -> usize {
        self.neighbours.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn finite_vertices(&self) -> &[Vec<u32>] {
        &self.finite_vertices
    }

    pub fn ideal_vertices(&self) -> &[IdealVertex] {
        &self.ideal_vertices
    }

    pub fn ideal_vertex(&self, v: usize) -> Result<&IdealVertex> {
        self.ideal_vertices.get(v).ok_or(Error::InvalidIdealVertex(v))
    }

    /// True iff the facets in `set` have a common face: they all contain a
    /// common finite vertex, or they are link facets of a common ideal
    /// vertex without containing one of its opposite pairs.
    pub fn spans_simplex(&self, set: &[u32]) -> bool {
        let Some(&pivot) = set
            .iter()
            .min_by_key(|&&f| self.facet_finite[f as usize].len() + self.facet_ideal[f as usize].len())
        else {
            return false;
        };
        let finite = self.facet_finite[pivot as usize].iter().any(|&w| {
            let fs = &self.finite_vertices[w as usize];
            set.iter().all(|f| fs.binary_search(f).is_ok())
        });
        if finite {
            return true;
        }
        self.facet_ideal[pivot as usize].iter().any(|&v| {
            let iv = &self.ideal_vertices[v as usize];
            let mut used = 0u64;
            for &f in set {
                match iv.pair_of(f) {
                    Some(p) if used >> p & 1 == 0 => used |= 1 << p,
                    _ => return false,
                }
            }
            true
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.dim;
        for &(a, b) in &self.adjacency_pairs {
            if a == b {
                report.push(Violation::SelfAdjacent(a));
            }
        }
        for (w, fs) in self.finite_vertices.iter().enumerate() {
            if fs.len() != n {
                report.push(Violation::FiniteVertexSize {
                    vertex: w,
                    expected: n,
                    found: fs.len(),
                });
            }
            if fs.windows(2).any(|p| p[0] == p[1]) {
                report.push(Violation::RepeatedFacet {
                    vertex: w,
                    ideal: false,
                });
            }
            for (i, &a) in fs.iter().enumerate() {
                for &b in &fs[i + 1..] {
                    if a != b && !self.is_adjacent(a, b) {
                        report.push(Violation::FiniteVertexNotAdjacent { vertex: w, a, b });
                    }
                }
            }
        }
        for (v, iv) in self.ideal_vertices.iter().enumerate() {
            if iv.pairs.len() + 1 != n {
                report.push(Violation::IdealVertexSize {
                    vertex: v,
                    expected: n.saturating_sub(1),
                    found: iv.pairs.len(),
                });
            }
            let mut fs: Vec<u32> = iv.facets().collect();
            fs.sort_unstable();
            if fs.windows(2).any(|p| p[0] == p[1]) {
                report.push(Violation::RepeatedFacet { vertex: v, ideal: true });
            }
            for (i, p) in iv.pairs.iter().enumerate() {
                if self.is_adjacent(p[0], p[1]) {
                    report.push(Violation::OppositeFacetsAdjacent {
                        vertex: v,
                        a: p[0],
                        b: p[1],
                    });
                }
                for q in &iv.pairs[i + 1..] {
                    for &a in p {
                        for &b in q {
                            if a != b && !self.is_adjacent(a, b) {
                                report.push(Violation::IdealCrossPairNotAdjacent { vertex: v, a, b });
                            }
                        }
                    }
                }
            }
        }
        for f in 0..self.num_facets {
            if self.facet_finite[f].is_empty() && self.facet_ideal[f].is_empty() {
                report.push(Violation::FacetWithoutVertex(f as u32));
            }
        }
        report
    }

    /// The compact right-angled square: four facets in a cycle.
    pub fn square() -> Self {
        let adjacency = vec![(0, 1), (1, 2), (2, 3), (0, 3)];
        let finite = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
        Self::new(2, 4, adjacency, finite, Vec::new()).expect("indices in range")
    }

    /// A right-angled `2n`-gon with `2n - 1` finite vertices and one ideal
    /// vertex, between the last facet and facet 0.
    pub fn ideal_polygon(n: usize) -> Self {
        assert!(n >= 2, "need at least a 4-gon");
        let m = 2 * n as u32;
        let adjacency = (0..m - 1).map(|i| (i, i + 1)).collect();
        let finite = (0..m - 1).map(|i| vec![i, i + 1]).collect();
        let ideal = vec![IdealVertex {
            pairs: vec![[m - 1, 0]],
        }];
        Self::new(2, m as usize, adjacency, finite, ideal).expect("indices in range")
    }

    /// The Euclidean cube; facets `2i` and `2i + 1` are opposite.
    pub fn cube() -> Self {
        let mut adjacency = Vec::new();
        for a in 0..6u32 {
            for b in a + 1..6 {
                if a / 2 != b / 2 {
                    adjacency.push((a, b));
                }
            }
        }
        let finite = (0..8u32)
            .map(|bits| (0..3).map(|i| 2 * i + (bits >> i & 1)).collect())
            .collect();
        Self::new(3, 6, adjacency, finite, Vec::new()).expect("indices in range")
    }

    /// All facet sets of size `1..=max_size` that span a face, grouped by
    /// size (`result[k - 1]` holds the `k`-sets), each sorted, in
    /// lexicographic order.
    pub fn spanning_sets(&self, max_size: usize) -> Vec<Vec<Vec<u32>>> {
        let mut out: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_size];
        let push_subsets = |facets: &[u32], out: &mut Vec<Vec<Vec<u32>>>| {
            let n = facets.len();
            for mask in 1u64..(1u64 << n) {
                let k = mask.count_ones() as usize;
                if k <= max_size {
                    out[k - 1].push((0..n).filter(|&i| mask >> i & 1 == 1).map(|i| facets[i]).collect());
                }
            }
        };
        for fs in &self.finite_vertices {
            push_subsets(fs, &mut out);
        }
        for iv in &self.ideal_vertices {
            let pairs = iv.pairs.len();
            // choose a subset of pairs and one facet from each
            let mut choice = vec![0u8; pairs];
            loop {
                let set: Vec<u32> = (0..pairs)
                    .filter(|&p| choice[p] != 0)
                    .map(|p| iv.pairs[p][choice[p] as usize - 1])
                    .collect();
                if !set.is_empty() && set.len() <= max_size {
                    let mut set = set;
                    set.sort_unstable();
                    out[set.len() - 1].push(set);
                }
                let mut p = 0;
                while p < pairs && choice[p] == 2 {
                    choice[p] = 0;
                    p += 1;
                }
                if p == pairs {
                    break;
                }
                choice[p] += 1;
            }
        }
        for level in &mut out {
            level.sort_unstable();
            level.dedup();
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn adjacency_pairs_raw(&self) -> &[(u32, u32)] {
        &self.adjacency_pairs
    }
}

/// A facet colouring with colours in `1..=palette`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colouring {
    palette: usize,
    colours: Vec<u32>,
}

impl Colouring {
    pub fn new(palette: usize, colours: Vec<u32>) -> Self {
        Self { palette, colours }
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    #[inline]
    pub fn colour(&self, facet: u32) -> u32 {
        self.colours[facet as usize]
    }

    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    /// Bit of `Z_2^c` toggled by crossing `facet`.
    #[inline]
    pub fn bit(&self, facet: u32) -> u64 {
        1u64 << (self.colours[facet as usize] - 1)
    }

    pub fn validate(&self, polytope: &Polytope) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.colours.len() != polytope.num_facets() {
            report.push(Violation::ColouringLength {
                expected: polytope.num_facets(),
                found: self.colours.len(),
            });
            return report;
        }
        let mut used = vec![false; self.palette + 1];
        for (f, &c) in self.colours.iter().enumerate() {
            if c == 0 || c as usize > self.palette {
                report.push(Violation::ColourOutOfRange {
                    facet: f as u32,
                    colour: c,
                });
            } else {
                used[c as usize] = true;
            }
        }
        for (a, b) in polytope.adjacent_pairs() {
            if self.colour(a) == self.colour(b) {
                report.push(Violation::AdjacentSameColour {
                    a,
                    b,
                    colour: self.colour(a),
                });
            }
        }
        for (c, &u) in used.iter().enumerate().skip(1) {
            if !u {
                report.push(Violation::UnusedColour(c as u32));
            }
        }
        report
    }

    /// Facets of each colour class, indexed by `colour - 1`.
    pub fn classes(&self) -> Vec<Vec<u32>> {
        let mut classes = vec![Vec::new(); self.palette];
        for (f, &c) in self.colours.iter().enumerate() {
            classes[c as usize - 1].push(f as u32);
        }
        classes
    }
}

/// Colours inherited by the `2(n-1)` link facets of an ideal vertex, in
/// pair order, together with the number of distinct colours among them.
pub fn link_colouring(polytope: &Polytope, colouring: &Colouring, vertex: usize) -> Result<(Vec<u32>, usize)> {
    let iv = polytope.ideal_vertex(vertex)?;
    let colours: Vec<u32> = iv.facets().map(|f| colouring.colour(f)).collect();
    let mut distinct = colours.clone();
    distinct.sort_unstable();
    distinct.dedup();
    Ok((colours, distinct.len()))
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspCount {
    /// Number of cusps above each ideal vertex, `2^(c - c')`.
    pub per_vertex: Vec<u128>,
    pub total: u128,
    /// Keyed by the number `c'` of link colours: (ideal vertices, cusps).
    pub by_link_colours: BTreeMap<usize, (usize, u128)>,
}

pub fn cusp_count(polytope: &Polytope, colouring: &Colouring) -> CuspCount {
    let c = colouring.palette();
    let mut per_vertex = Vec::with_capacity(polytope.ideal_vertices().len());
    let mut by_link_colours = BTreeMap::new();
    for v in 0..polytope.ideal_vertices().len() {
        let (_, c_link) = link_colouring(polytope, colouring, v).expect("vertex in range");
        let cusps = 1u128 << (c - c_link);
        per_vertex.push(cusps);
        let entry = by_link_colours.entry(c_link).or_insert((0usize, 0u128));
        entry.0 += 1;
        entry.1 += cusps;
    }
    let total = per_vertex.iter().sum();
    CuspCount {
        per_vertex,
        total,
        by_link_colours,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    SelfAdjacent(u32),
    FiniteVertexSize {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    RepeatedFacet {
        vertex: usize,
        ideal: bool,
    },
    FiniteVertexNotAdjacent {
        vertex: usize,
        a: u32,
        b: u32,
    },
    IdealVertexSize {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    OppositeFacetsAdjacent {
        vertex: usize,
        a: u32,
        b: u32,
    },
    IdealCrossPairNotAdjacent {
        vertex: usize,
        a: u32,
        b: u32,
    },
    FacetWithoutVertex(u32),
    ColouringLength {
        expected: usize,
        found: usize,
    },
    ColourOutOfRange {
        facet: u32,
        colour: u32,
    },
    AdjacentSameColour {
        a: u32,
        b: u32,
        colour: u32,
    },
    UnusedColour(u32),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SelfAdjacent(a) => write!(f, "facet {a} is marked adjacent to itself"),
            Self::FiniteVertexSize {
                vertex,
                expected,
                found,
            } => {
                write!(f, "finite vertex {vertex} has {found} facets, expected {expected}")
            }
            Self::RepeatedFacet { vertex, ideal } => {
                let kind = if *ideal { "ideal" } else { "finite" };
                write!(f, "{kind} vertex {vertex} lists a facet twice")
            }
            Self::FiniteVertexNotAdjacent { vertex, a, b } => {
                write!(f, "facets {a} and {b} of finite vertex {vertex} are not adjacent")
            }
            Self::IdealVertexSize {
                vertex,
                expected,
                found,
            } => {
                write!(
                    f,
                    "ideal vertex {vertex} has {found} opposite pairs, expected {expected}"
                )
            }
            Self::OppositeFacetsAdjacent { vertex, a, b } => {
                write!(f, "opposite facets adjacent: {a} and {b} at ideal vertex {vertex}")
            }
            Self::IdealCrossPairNotAdjacent { vertex, a, b } => {
                write!(
                    f,
                    "facets {a} and {b} from distinct pairs of ideal vertex {vertex} are not adjacent"
                )
            }
            Self::FacetWithoutVertex(a) => write!(f, "facet {a} contains no vertex"),
            Self::ColouringLength { expected, found } => {
                write!(f, "colouring has {found} entries, polytope has {expected} facets")
            }
            Self::ColourOutOfRange { facet, colour } => {
                write!(f, "facet {facet} has colour {colour} outside the palette")
            }
            Self::AdjacentSameColour { a, b, colour } => {
                write!(f, "adjacent facets {a} and {b} share colour {colour}")
            }
            Self::UnusedColour(c) => write!(f, "colour {c} is not used"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_polytopes_are_valid() {
        assert!(Polytope::square().validate().is_valid());
        assert!(Polytope::cube().validate().is_valid());
        for n in 2..7 {
            assert!(Polytope::ideal_polygon(n).validate().is_valid());
        }
    }

    #[test]
    fn opposite_facets_marked_adjacent_are_reported() {
        let p = Polytope::ideal_polygon(3);
        let mut adjacency = p.adjacency_pairs_raw().to_vec();
        adjacency.push((5, 0));
        let bad = Polytope::new(
            2,
            6,
            adjacency,
            p.finite_vertices().to_vec(),
            p.ideal_vertices().to_vec(),
        )
        .unwrap();
        let report = bad.validate();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| v.to_string().starts_with("opposite facets adjacent")));
    }

    #[test]
    fn out_of_range_facet_is_an_error() {
        let err = Polytope::new(2, 3, vec![(0, 3)], vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::FacetOutOfRange { index: 3, .. }));
    }

    #[test]
    fn square_colourings() {
        let p = Polytope::square();
        assert!(Colouring::new(2, vec![1, 2, 1, 2]).validate(&p).is_valid());
        let bad = Colouring::new(2, vec![1, 1, 2, 2]).validate(&p);
        assert!(bad
            .violations
            .contains(&Violation::AdjacentSameColour { a: 0, b: 1, colour: 1 }));
        let unused = Colouring::new(3, vec![1, 2, 1, 2]).validate(&p);
        assert_eq!(unused.violations, vec![Violation::UnusedColour(3)]);
    }

    #[test]
    fn polygon_link_and_cusps() {
        let p = Polytope::ideal_polygon(4);
        let col = Colouring::new(2, vec![1, 2, 1, 2, 1, 2, 1, 2]);
        let (colours, distinct) = link_colouring(&p, &col, 0).unwrap();
        assert_eq!(colours, vec![2, 1]);
        assert_eq!(distinct, 2);
        let count = cusp_count(&p, &col);
        assert_eq!(count.total, 1);
        assert!(matches!(link_colouring(&p, &col, 1), Err(Error::InvalidIdealVertex(1))));
    }

    #[test]
    fn spans_simplex_cases() {
        let p = Polytope::ideal_polygon(3);
        assert!(p.spans_simplex(&[2]));
        assert!(p.spans_simplex(&[1, 2]));
        // opposite pair at the ideal vertex meets only at infinity
        assert!(!p.spans_simplex(&[5, 0]));
        assert!(!p.spans_simplex(&[0, 2]));
        let cube = Polytope::cube();
        assert!(cube.spans_simplex(&[0, 2, 4]));
        assert!(!cube.spans_simplex(&[0, 1]));
    }
}
