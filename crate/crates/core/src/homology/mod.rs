//! Simplicial complexes, chain complexes, and exact homology.
//!
//! Ranks are computed by sparse elimination with exact arithmetic: over
//! `Z_2` directly, and over `Z` (which also yields the rational ranks) with
//! an arbitrary-precision fallback and a dense Smith normal form for any
//! block left without unit pivots.

mod collapse;
pub mod snf;
pub mod sparse;
mod tietze;

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

pub use collapse::certify_contractible;
pub use sparse::{SmithForm, SparseColumn};
pub use tietze::{
    certify_simply_connected, edge_path_presentation, Presentation, TietzeOutcome, DEFAULT_TIETZE_BUDGET,
};

/// Result of a one-sided topological certificate: it never disproves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Certificate {
    Certified,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Field {
    Q,
    Z2,
}

/// An abstract simplicial complex with simplices stored per dimension as
/// sorted vertex tuples, in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplicialComplex {
    levels: Vec<Vec<u32>>,
    /// Simplices above this dimension were not recorded.
    truncated_above: Option<usize>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Downward closure of the given simplices.
    pub fn from_simplices<S: AsRef<[u32]>>(simplices: &[S]) -> Self {
        Self::closure(simplices, None)
    }

    /// Downward closure, keeping only simplices of dimension `<= max_dim`.
    pub fn from_simplices_truncated<S: AsRef<[u32]>>(simplices: &[S], max_dim: usize) -> Self {
        Self::closure(simplices, Some(max_dim))
    }

    fn closure<S: AsRef<[u32]>>(simplices: &[S], max_dim: Option<usize>) -> Self {
        let mut sets: Vec<HashSet<Vec<u32>>> = Vec::new();
        let mut truncated = false;
        for s in simplices {
            let mut s: Vec<u32> = s.as_ref().to_vec();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            let n = s.len();
            if max_dim.is_some_and(|d| n > d + 1) {
                truncated = true;
            }
            let top = max_dim.map_or(n, |d| n.min(d + 1));
            for mask in 1u64..(1u64 << n) {
                let k = mask.count_ones() as usize;
                if k > top {
                    continue;
                }
                let face: Vec<u32> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                if sets.len() < k {
                    sets.resize_with(k, HashSet::new);
                }
                sets[k - 1].insert(face);
            }
        }
        let levels = sets
            .into_iter()
            .map(|set| {
                let mut v: Vec<Vec<u32>> = set.into_iter().collect();
                v.sort_unstable();
                v.concat()
            })
            .collect();
        Self {
            levels,
            truncated_above: if truncated { max_dim } else { None },
        }
    }

    /// Builds from per-dimension flat arrays that are already sorted and
    /// closed under faces.
    pub(crate) fn from_levels(levels: Vec<Vec<u32>>, truncated_above: Option<usize>) -> Self {
        let mut levels = levels;
        while levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        Self {
            levels,
            truncated_above,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Highest dimension present, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.levels.len().checked_sub(1)
    }

    pub fn truncated_above(&self) -> Option<usize> {
        self.truncated_above
    }

    pub fn count(&self, k: usize) -> usize {
        self.levels.get(k).map_or(0, |l| l.len() / (k + 1))
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[u32] {
        &self.levels[k][i * (k + 1)..(i + 1) * (k + 1)]
    }

    pub fn simplices(&self, k: usize) -> impl Iterator<Item = &[u32]> {
        self.levels.get(k).map(|l| l.chunks_exact(k + 1)).into_iter().flatten()
    }

    pub fn vertices(&self) -> &[u32] {
        self.levels.first().map_or(&[], Vec::as_slice)
    }

    pub fn num_simplices(&self) -> usize {
        (0..self.levels.len()).map(|k| self.count(k)).sum()
    }

    pub fn index_of(&self, simplex: &[u32]) -> Option<usize> {
        let k = simplex.len().checked_sub(1)?;
        let level = self.levels.get(k)?;
        let n = level.len() / (k + 1);
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match level[mid * (k + 1)..(mid + 1) * (k + 1)].cmp(simplex) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        self.index_of(simplex).is_some()
    }

    /// Simplices whose vertices all lie in `keep`.
    pub fn full_subcomplex(&self, keep: &[u32]) -> Self {
        let size = keep.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
        let mut mask = vec![false; size];
        for &v in keep {
            mask[v as usize] = true;
        }
        let keep = |v: &u32| mask.get(*v as usize).copied().unwrap_or(false);
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, level)| {
                level
                    .chunks_exact(k + 1)
                    .filter(|s| s.iter().all(keep))
                    .flatten()
                    .copied()
                    .collect()
            })
            .collect();
        Self::from_levels(levels, self.truncated_above)
    }

    /// Cone with apex `apex`, which must not already be a vertex.
    pub fn cone(&self, apex: u32) -> Self {
        assert!(!self.vertices().contains(&apex), "apex already a vertex");
        let mut simplices: Vec<Vec<u32>> = vec![vec![apex]];
        for k in 0..self.levels.len() {
            for s in self.simplices(k) {
                let mut t = s.to_vec();
                t.push(apex);
                simplices.push(t);
            }
        }
        Self::from_simplices(&simplices)
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..self.levels.len())
            .map(|k| {
                if k % 2 == 0 {
                    self.count(k) as i64
                } else {
                    -(self.count(k) as i64)
                }
            })
            .sum()
    }

    pub fn num_components(&self) -> usize {
        let verts = self.vertices();
        let mut uf = UnionFind::new(verts.len());
        for e in self.simplices(1) {
            let a = verts.binary_search(&e[0]).expect("vertex");
            let b = verts.binary_search(&e[1]).expect("vertex");
            uf.union(a, b);
        }
        uf.components()
    }

    /// Boundary matrix `C_k -> C_{k-1}` as sparse columns, `k >= 1`.
    pub fn boundary(&self, k: usize) -> Vec<SparseColumn<i64>> {
        let mut cols = Vec::with_capacity(self.count(k));
        let mut face = Vec::with_capacity(k);
        for s in self.simplices(k) {
            let mut col: Vec<(u32, i64)> = (0..=k)
                .map(|i| {
                    face.clear();
                    face.extend(s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
                    let row = self.index_of(&face).expect("complex closed under faces");
                    (row as u32, if i % 2 == 0 { 1 } else { -1 })
                })
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            cols.push(col);
        }
        cols
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let dims = (0..self.levels.len()).map(|k| self.count(k)).collect();
        let boundaries = (1..self.levels.len()).map(|k| self.boundary(k)).collect();
        ChainComplex::new(dims, boundaries, self.truncated_above.is_none())
    }
}

/// A finite free chain complex `C_top -> ... -> C_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `boundaries[k - 1]` is `d_k : C_k -> C_{k-1}`.
    boundaries: Vec<Vec<SparseColumn<i64>>>,
    /// False when cells above the top dimension exist but were not built.
    complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub rank: usize,
    #[serde(serialize_with = "serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<Vec<SparseColumn<i64>>>, complete: bool) -> Self {
        assert_eq!(
            boundaries.len() + 1,
            dims.len().max(1),
            "one boundary map per positive dimension"
        );
        for (k, b) in boundaries.iter().enumerate() {
            assert_eq!(b.len(), dims[k + 1], "d_{} has wrong column count", k + 1);
        }
        Self {
            dims,
            boundaries,
            complete,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn boundary(&self, k: usize) -> &[SparseColumn<i64>] {
        if k == 0 || k > self.boundaries.len() {
            &[]
        } else {
            &self.boundaries[k - 1]
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    fn rows(&self, k: usize) -> usize {
        self.dims.get(k - 1).copied().unwrap_or(0)
    }

    fn require(&self, up_to: usize) -> Result<()> {
        let top = self.dims.len().saturating_sub(1);
        if !self.complete && up_to + 1 > top {
            return Err(Error::DimensionBound {
                built: top,
                needed: up_to + 1,
            });
        }
        Ok(())
    }

    /// Verifies `d_k o d_{k+1} = 0` for every `k`.
    pub fn is_chain_complex(&self) -> bool {
        for k in 1..self.boundaries.len() {
            let lower = &self.boundaries[k - 1];
            for col in &self.boundaries[k] {
                let mut acc: std::collections::BTreeMap<u32, i64> = Default::default();
                for &(r, v) in col {
                    for &(r2, w) in &lower[r as usize] {
                        *acc.entry(r2).or_default() += v * w;
                    }
                }
                if acc.values().any(|&x| x != 0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn rank(&self, k: usize, field: Field) -> usize {
        let b = self.boundary(k);
        if b.is_empty() {
            return 0;
        }
        match field {
            Field::Z2 => sparse::rank_gf2(self.rows(k), b),
            Field::Q => sparse::smith_form(self.rows(k), b).rank,
        }
    }

    /// Betti numbers `b_0..=b_up_to` over the given field.
    pub fn betti(&self, field: Field, up_to: usize) -> Result<Vec<usize>> {
        self.require(up_to)?;
        let ranks: Vec<usize> = (0..=up_to + 1).map(|k| self.rank(k, field)).collect();
        Ok((0..=up_to)
            .map(|k| self.dims.get(k).copied().unwrap_or(0) - ranks[k] - ranks[k + 1])
            .collect())
    }

    /// Integral homology `H_0..=H_up_to`.
    pub fn integral_homology(&self, up_to: usize) -> Result<Vec<HomologyGroup>> {
        self.require(up_to)?;
        let forms: Vec<SmithForm> = (0..=up_to + 1)
            .map(|k| {
                let b = self.boundary(k);
                if b.is_empty() {
                    SmithForm {
                        rank: 0,
                        torsion: Vec::new(),
                    }
                } else {
                    sparse::smith_form(self.rows(k), b)
                }
            })
            .collect();
        Ok((0..=up_to)
            .map(|k| HomologyGroup {
                rank: self.dims.get(k).copied().unwrap_or(0) - forms[k].rank - forms[k + 1].rank,
                torsion: forms[k + 1].torsion.clone(),
            })
            .collect())
    }
}

/// Betti numbers of a simplicial complex; `up_to` must not exceed the
/// recorded dimension minus one for truncated complexes.
pub fn betti(complex: &SimplicialComplex, field: Field, up_to: usize) -> Result<Vec<usize>> {
    complex.chain_complex().betti(field, up_to)
}

/// Reduced Betti numbers: `b_0` lowered by one for a nonempty complex.
pub fn reduced_betti(complex: &SimplicialComplex, field: Field, up_to: usize) -> Result<Vec<usize>> {
    let mut b = betti(complex, field, up_to)?;
    if !complex.is_empty() {
        b[0] -= 1;
    }
    Ok(b)
}

pub fn integral_homology(complex: &SimplicialComplex, up_to: usize) -> Result<Vec<HomologyGroup>> {
    complex.chain_complex().integral_homology(up_to)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hollow_triangle() -> SimplicialComplex {
        SimplicialComplex::from_simplices(&[[0, 1], [1, 2], [0, 2]])
    }

    fn sphere2() -> SimplicialComplex {
        SimplicialComplex::from_simplices(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    }

    #[test]
    fn closure_and_lookup() {
        let k = SimplicialComplex::from_simplices(&[vec![3, 1, 2]]);
        assert_eq!(k.count(0), 3);
        assert_eq!(k.count(1), 3);
        assert_eq!(k.count(2), 1);
        assert_eq!(k.index_of(&[1, 3]), Some(1));
        assert_eq!(k.euler_characteristic(), 1);
    }

    #[test]
    fn full_subcomplex_cases() {
        let k = hollow_triangle();
        assert_eq!(k.full_subcomplex(&[0, 1, 2]), k);
        assert!(k.full_subcomplex(&[]).is_empty());
        let edge = k.full_subcomplex(&[0, 2]);
        assert_eq!(edge, SimplicialComplex::from_simplices(&[[0, 2]]));
    }

    #[test]
    fn circle_and_sphere() {
        assert_eq!(betti(&hollow_triangle(), Field::Q, 1).unwrap(), vec![1, 1]);
        assert_eq!(betti(&sphere2(), Field::Q, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(betti(&sphere2(), Field::Z2, 2).unwrap(), vec![1, 0, 1]);
        let h = integral_homology(&sphere2(), 2).unwrap();
        assert_eq!(h.iter().map(|g| g.rank).collect::<Vec<_>>(), vec![1, 0, 1]);
        assert!(h.iter().all(|g| g.torsion.is_empty()));
        assert!(sphere2().chain_complex().is_chain_complex());
    }

    #[test]
    fn two_points() {
        let k = SimplicialComplex::from_simplices(&[[0], [5]]);
        let h = integral_homology(&k, 0).unwrap();
        assert_eq!(h[0].rank, 2);
        assert_eq!(reduced_betti(&k, Field::Q, 0).unwrap(), vec![1]);
    }

    #[test]
    fn truncated_complex_bounds_degree() {
        let k = SimplicialComplex::from_simplices_truncated(&[[0, 1, 2, 3]], 1);
        assert_eq!(k.truncated_above(), Some(1));
        assert!(matches!(betti(&k, Field::Q, 1), Err(Error::DimensionBound { .. })));
        assert_eq!(betti(&k, Field::Q, 0).unwrap(), vec![1]);
    }
}
