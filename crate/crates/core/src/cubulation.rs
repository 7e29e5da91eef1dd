//! The cube complex dual to the tessellation by `2^c` copies of the polytope.
//!
//! A `k`-cube is a pair `(v, S)` where `S` is a `k`-set of facets spanning a
//! face of the polytope and `v` in `Z_2^c` is the lowest vertex of the cube,
//! i.e. the bits of the colours of `S` are clear in `v`. Cells are never
//! materialized one by one: within a dimension, the cells of face type `S`
//! occupy a contiguous index range ordered by the free bits of `v`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{classify_all, status_at, Moves, State, Status};
use crate::homology::{ChainComplex, SparseColumn};
use crate::polytope::{Colouring, Polytope};

/// Default bound on the number of cells of a single dimension.
pub const DEFAULT_CELL_CAP: u64 = 50_000_000;

/// Largest palette for which cube complexes are built.
pub const MAX_PALETTE: usize = 40;

/// Packs the bits of `v` selected by `mask` into the low bits.
#[inline]
fn pext(v: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    let mut k = 0;
    while mask != 0 {
        let t = mask.trailing_zeros();
        out |= (v >> t & 1) << k;
        k += 1;
        mask &= mask - 1;
    }
    out
}

/// Inverse of [`pext`]: spreads the low bits of `x` over `mask`.
#[inline]
fn pdep(mut x: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    while mask != 0 {
        let t = mask.trailing_zeros();
        out |= (x & 1) << t;
        x >>= 1;
        mask &= mask - 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct FaceType {
    facets: Vec<u32>,
    mask: u64,
}

#[derive(Clone, Debug)]
pub struct CubeComplex {
    palette: usize,
    full_mask: u64,
    poly_dim: usize,
    /// `types[k]` lists the face types of `k`-cubes, sorted.
    types: Vec<Vec<FaceType>>,
    facet_bit: Vec<u64>,
    orientation: Option<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellCounts {
    pub counts: Vec<u128>,
    pub euler_characteristic: Option<i128>,
}

impl CubeComplex {
    /// Builds all cubes of dimension `<= up_to_dim`.
    pub fn build(polytope: &Polytope, colouring: &Colouring, up_to_dim: usize, cap: u64) -> Result<Self> {
        let c = colouring.palette();
        if c > MAX_PALETTE {
            return Err(Error::PaletteTooLarge(c, MAX_PALETTE));
        }
        let top = up_to_dim.min(polytope.dim()).min(c);
        let mut types = vec![vec![FaceType {
            facets: Vec::new(),
            mask: 0,
        }]];
        if top > 0 {
            for (i, level) in polytope.spanning_sets(top).into_iter().enumerate() {
                let k = i + 1;
                let level: Vec<FaceType> = level
                    .into_iter()
                    .filter_map(|facets| {
                        let mask = facets.iter().fold(0u64, |m, &f| m | colouring.bit(f));
                        (mask.count_ones() as usize == k).then_some(FaceType { facets, mask })
                    })
                    .collect();
                let cells = level.len() as u128 * (1u128 << (c - k));
                if cells > cap as u128 {
                    return Err(Error::CellCapExceeded { dim: k, cells, cap });
                }
                types.push(level);
            }
        }
        if (1u128 << c) > cap as u128 {
            return Err(Error::CellCapExceeded {
                dim: 0,
                cells: 1u128 << c,
                cap,
            });
        }
        Ok(Self {
            palette: c,
            full_mask: if c == 64 { !0 } else { (1u64 << c) - 1 },
            poly_dim: polytope.dim(),
            types,
            facet_bit: (0..polytope.num_facets() as u32).map(|f| colouring.bit(f)).collect(),
            orientation: None,
        })
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    /// Highest dimension of cubes that were built.
    pub fn built_dim(&self) -> usize {
        self.types.len() - 1
    }

    pub fn is_full(&self) -> bool {
        self.built_dim() >= self.poly_dim.min(self.palette) || self.types.last().is_some_and(|t| t.is_empty())
    }

    pub fn num_cells(&self, k: usize) -> usize {
        self.types.get(k).map_or(0, |t| t.len() << (self.palette - k))
    }

    pub fn num_vertices(&self) -> usize {
        1usize << self.palette
    }

    pub fn cell_counts(&self) -> CellCounts {
        let counts: Vec<u128> = (0..self.types.len())
            .map(|k| self.types[k].len() as u128 * (1u128 << (self.palette - k)))
            .collect();
        let euler_characteristic = self.is_full().then(|| {
            counts
                .iter()
                .enumerate()
                .map(|(k, &n)| if k % 2 == 0 { n as i128 } else { -(n as i128) })
                .sum()
        });
        CellCounts {
            counts,
            euler_characteristic,
        }
    }

    pub fn euler_characteristic(&self) -> Result<i64> {
        if !self.is_full() {
            return Err(Error::DimensionBound {
                built: self.built_dim(),
                needed: self.poly_dim,
            });
        }
        Ok((0..self.types.len())
            .map(|k| {
                let n = self.num_cells(k) as i64;
                if k % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum())
    }

    fn type_offset(&self, k: usize, t: usize) -> usize {
        t << (self.palette - k)
    }

    /// Index of the cube of face type `t` with lowest vertex `v`.
    #[inline]
    fn cell_index(&self, k: usize, t: usize, v: u64) -> usize {
        let ft = &self.types[k][t];
        debug_assert_eq!(v & ft.mask, 0);
        self.type_offset(k, t) + pext(v, self.full_mask & !ft.mask) as usize
    }

    /// The cube with the given index: lowest vertex and facet set.
    pub fn cell(&self, k: usize, index: usize) -> (u64, &[u32]) {
        let per = 1usize << (self.palette - k);
        let ft = &self.types[k][index / per];
        (pdep((index % per) as u64, self.full_mask & !ft.mask), &ft.facets)
    }

    fn type_index(&self, k: usize, facets: &[u32]) -> usize {
        self.types[k]
            .binary_search_by(|t| t.facets.as_slice().cmp(facets))
            .expect("face of a cube type is a cube type")
    }

    /// Index of the edge dual to `facet` at vertex `v`, and whether leaving
    /// `v` along it runs in the canonical (lowest vertex first) direction.
    pub fn edge_at(&self, v: u64, facet: u32) -> (usize, bool) {
        let bit = self.facet_bit[facet as usize];
        let forward = v & bit == 0;
        let base = v & !bit;
        (
            self.type_offset(1, facet as usize) + pext(base, self.full_mask & !bit) as usize,
            forward,
        )
    }

    /// Boundary of the `k`-cube with the given index, as `(face index, sign)`.
    pub fn cell_boundary(&self, k: usize, index: usize) -> Vec<(usize, i64)> {
        let (v, facets) = self.cell(k, index);
        let mut out = Vec::with_capacity(2 * k);
        let mut face = Vec::with_capacity(k);
        for i in 0..k {
            face.clear();
            face.extend(facets.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &f)| f));
            let t = self.type_index(k - 1, &face);
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let bit = self.facet_bit[facets[i] as usize];
            out.push((self.cell_index(k - 1, t, v), -sign));
            out.push((self.cell_index(k - 1, t, v | bit), sign));
        }
        out
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let dims: Vec<usize> = (0..self.types.len()).map(|k| self.num_cells(k)).collect();
        let boundaries = (1..self.types.len())
            .map(|k| {
                (0..dims[k])
                    .map(|i| {
                        let mut col: SparseColumn<i64> = self
                            .cell_boundary(k, i)
                            .into_iter()
                            .map(|(r, s)| (r as u32, s))
                            .collect();
                        col.sort_unstable_by_key(|e| e.0);
                        col
                    })
                    .collect()
            })
            .collect();
        ChainComplex::new(dims, boundaries, self.is_full())
    }

    /// Orients every edge from the state and moves: the edge dual to `F` at
    /// its lowest vertex `v` points away from `v` iff `F` has status `O` there.
    pub fn orient(&mut self, colouring: &Colouring, state: &State, moves: &Moves) {
        let n = self.num_cells(1);
        let mut orientation = Vec::with_capacity(n);
        for i in 0..n {
            let (v, facets) = self.cell(1, i);
            orientation.push(status_at(colouring, state, moves, v, facets[0]) == Status::O);
        }
        self.orientation = Some(orientation);
    }

    pub fn orientation(&self) -> Option<&[bool]> {
        self.orientation.as_deref()
    }

    /// Direction of the edge dual to `facet` at `v`: true if it points away
    /// from `v`. Requires [`CubeComplex::orient`].
    pub fn points_away(&self, v: u64, facet: u32) -> Option<bool> {
        let (e, forward) = self.edge_at(v, facet);
        self.orientation.as_ref().map(|o| o[e] == forward)
    }

    /// The 1-cochain assigning 1 to every oriented edge, in canonical
    /// direction, after checking that no pair of facets is bad and that its
    /// coboundary vanishes on every square that was built.
    pub fn unit_cocycle(
        &mut self,
        polytope: &Polytope,
        colouring: &Colouring,
        state: &State,
        moves: &Moves,
    ) -> Result<Vec<i64>> {
        let report = classify_all(polytope, colouring, state, moves);
        if let Some(&(a, b)) = report.bad_pairs.first() {
            return Err(Error::BadPairPresent(a, b));
        }
        if self.orientation.is_none() {
            self.orient(colouring, state, moves);
        }
        let z: Vec<i64> = self
            .orientation
            .as_ref()
            .expect("oriented")
            .iter()
            .map(|&f| if f { 1 } else { -1 })
            .collect();
        self.check_cocycle(&z)?;
        Ok(z)
    }

    /// Verifies that `z` vanishes on the boundary of every square.
    pub fn check_cocycle(&self, z: &[i64]) -> Result<()> {
        if z.len() != self.num_cells(1) {
            return Err(Error::Shape(format!(
                "cochain has {} entries, {} edges",
                z.len(),
                self.num_cells(1)
            )));
        }
        for sq in 0..self.num_cells(2) {
            let value: i64 = self.cell_boundary(2, sq).iter().map(|&(e, s)| s * z[e]).sum();
            if value != 0 {
                return Err(Error::NotACocycle { square: sq, value });
            }
        }
        Ok(())
    }
}

/// The `ell`-fold cyclic cover of a cube complex determined by an integer
/// 1-cocycle reduced mod `ell`. Cell `(x, j)` has index `x * ell + j`.
#[derive(Clone, Debug)]
pub struct CyclicCover<'a> {
    base: &'a CubeComplex,
    shift: Vec<u64>,
    ell: u64,
}

impl<'a> CyclicCover<'a> {
    pub fn new(base: &'a CubeComplex, cocycle: &[i64], ell: u64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Input("cover degree must be positive".into()));
        }
        base.check_cocycle(cocycle)?;
        let shift = cocycle.iter().map(|&x| x.rem_euclid(ell as i64) as u64).collect();
        Ok(Self { base, shift, ell })
    }

    pub fn degree(&self) -> u64 {
        self.ell
    }

    pub fn num_cells(&self, k: usize) -> usize {
        self.base.num_cells(k) * self.ell as usize
    }

    pub fn euler_characteristic(&self) -> Result<i64> {
        Ok(self.base.euler_characteristic()? * self.ell as i64)
    }

    /// Boundary of the lift of base cell `index` to sheet `sheet`.
    pub fn cell_boundary(&self, k: usize, index: usize, sheet: u64) -> Vec<(usize, i64)> {
        let (v, facets) = self.base.cell(k, index);
        let ell = self.ell;
        let mut out = Vec::with_capacity(2 * k);
        let mut face = Vec::with_capacity(k);
        for i in 0..k {
            face.clear();
            face.extend(facets.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &f)| f));
            let t = self.base.type_index(k - 1, &face);
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let bit = self.base.facet_bit[facets[i] as usize];
            let (edge, _) = self.base.edge_at(v, facets[i]);
            let upper_sheet = (sheet + self.shift[edge]) % ell;
            let low = self.base.cell_index(k - 1, t, v);
            let high = self.base.cell_index(k - 1, t, v | bit);
            out.push((low * ell as usize + sheet as usize, -sign));
            out.push((high * ell as usize + upper_sheet as usize, sign));
        }
        out
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let top = self.base.built_dim();
        let dims: Vec<usize> = (0..=top).map(|k| self.num_cells(k)).collect();
        let boundaries = (1..=top)
            .map(|k| {
                (0..self.base.num_cells(k))
                    .flat_map(|i| (0..self.ell).map(move |j| (i, j)))
                    .map(|(i, j)| {
                        let mut col: SparseColumn<i64> = self
                            .cell_boundary(k, i, j)
                            .into_iter()
                            .map(|(r, s)| (r as u32, s))
                            .collect();
                        col.sort_unstable_by_key(|e| e.0);
                        col
                    })
                    .collect()
            })
            .collect();
        ChainComplex::new(dims, boundaries, self.base.is_full())
    }
}
