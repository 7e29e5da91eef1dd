//! Sparse elimination over Z, Z_2, and arbitrary-precision Z.
//!
//! Pivots are unit entries. Each pivot `(r, c)` is split off after clearing
//! row `r` with column operations, which are unimodular, so the unit pivots
//! contribute invariant factors equal to one and the remaining columns carry
//! the rest of the Smith normal form. Columns are processed shortest first
//! and, within a column, the pivot row with the fewest entries is chosen.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

pub trait Coeff: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `a / u` for a unit `u`.
    fn div_unit(a: &Self, u: &Self) -> Self;
    /// `a - f * b`.
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Result<Self, Overflow>;
}

/// Element of the field with two elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2(pub bool);

impl Coeff for Gf2 {
    fn zero() -> Self {
        Gf2(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn is_unit(&self) -> bool {
        self.0
    }
    fn div_unit(a: &Self, _u: &Self) -> Self {
        *a
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Result<Self, Overflow> {
        Ok(Gf2(a.0 ^ (f.0 & b.0)))
    }
}

impl Coeff for i64 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn div_unit(a: &Self, u: &Self) -> Self {
        a * u
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Result<Self, Overflow> {
        f.checked_mul(*b).and_then(|p| a.checked_sub(p)).ok_or(Overflow)
    }
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn div_unit(a: &Self, u: &Self) -> Self {
        a * u
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Result<Self, Overflow> {
        Ok(a - f * b)
    }
}

pub type SparseColumn<T> = Vec<(u32, T)>;

#[derive(Debug, Clone)]
pub struct Elimination<T> {
    /// Number of unit pivots split off.
    pub unit_rank: usize,
    /// Columns left without a usable unit pivot (nonzero, rows as in input).
    pub residual: Vec<SparseColumn<T>>,
}

/// `a - f * b` for sorted sparse columns; reports rows newly created in `a`.
fn axpy<T: Coeff>(
    a: &[(u32, T)],
    f: &T,
    b: &[(u32, T)],
    out: &mut Vec<(u32, T)>,
    fresh: &mut Vec<u32>,
) -> Result<(), Overflow> {
    out.clear();
    let zero = T::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ra = a.get(i).map_or(u32::MAX, |e| e.0);
        let rb = b.get(j).map_or(u32::MAX, |e| e.0);
        if ra < rb {
            out.push(a[i].clone());
            i += 1;
        } else if rb < ra {
            let v = T::sub_mul(&zero, f, &b[j].1)?;
            if !v.is_zero() {
                out.push((rb, v));
                fresh.push(rb);
            }
            j += 1;
        } else {
            let v = T::sub_mul(&a[i].1, f, &b[j].1)?;
            if !v.is_zero() {
                out.push((ra, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(())
}

pub fn eliminate<T: Coeff>(nrows: usize, mut cols: Vec<SparseColumn<T>>) -> Result<Elimination<T>, Overflow> {
    let ncols = cols.len();
    let mut row_occ: Vec<Vec<u32>> = vec![Vec::new(); nrows];
    for (c, col) in cols.iter().enumerate() {
        debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0), "column not sorted");
        for &(r, _) in col {
            row_occ[r as usize].push(c as u32);
        }
    }
    let mut active = vec![true; ncols];
    let mut stamp = vec![u32::MAX; ncols];
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = cols
        .iter()
        .enumerate()
        .filter(|(_, col)| !col.is_empty())
        .map(|(c, col)| Reverse((col.len() as u32, c as u32)))
        .collect();
    let mut unit_rank = 0;
    let mut buffer = Vec::new();
    let mut fresh = Vec::new();
    let mut round = 0u32;

    while let Some(Reverse((key, c))) = heap.pop() {
        let c = c as usize;
        if !active[c] || cols[c].len() as u32 != key || key == 0 {
            continue;
        }
        let pivot = cols[c]
            .iter()
            .filter(|(_, v)| v.is_unit())
            .min_by_key(|(r, _)| row_occ[*r as usize].len())
            .map(|(r, v)| (*r, v.clone()));
        let Some((r, u)) = pivot else {
            // revisited if another pivot modifies this column
            continue;
        };
        active[c] = false;
        unit_rank += 1;
        let pivot_col = std::mem::take(&mut cols[c]);
        let occ = std::mem::take(&mut row_occ[r as usize]);
        round += 1;
        for k in occ {
            let k = k as usize;
            if k == c || !active[k] || stamp[k] == round {
                continue;
            }
            stamp[k] = round;
            let Ok(pos) = cols[k].binary_search_by_key(&r, |e| e.0) else {
                continue;
            };
            let f = T::div_unit(&cols[k][pos].1, &u);
            fresh.clear();
            axpy(&cols[k], &f, &pivot_col, &mut buffer, &mut fresh)?;
            std::mem::swap(&mut cols[k], &mut buffer);
            for &row in &fresh {
                row_occ[row as usize].push(k as u32);
            }
            if !cols[k].is_empty() {
                heap.push(Reverse((cols[k].len() as u32, k as u32)));
            }
        }
    }

    let residual = cols
        .into_iter()
        .zip(active)
        .filter(|(col, a)| *a && !col.is_empty())
        .map(|(col, _)| col)
        .collect();
    Ok(Elimination { unit_rank, residual })
}

/// Rank over Z_2 of an integer matrix given by sparse columns.
pub fn rank_gf2(nrows: usize, cols: &[SparseColumn<i64>]) -> usize {
    let cols = cols
        .iter()
        .map(|col| {
            col.iter()
                .filter(|(_, v)| v.rem_euclid(2) == 1)
                .map(|&(r, _)| (r, Gf2(true)))
                .collect()
        })
        .collect();
    let e = eliminate(nrows, cols).expect("no overflow over Z_2");
    debug_assert!(e.residual.is_empty());
    e.unit_rank
}

/// Rank and invariant factors (all of them, including ones) of an integer
/// matrix. Runs in `i64` and falls back to arbitrary precision on overflow.
pub fn smith_form(nrows: usize, cols: &[SparseColumn<i64>]) -> SmithForm {
    match eliminate(nrows, cols.to_vec()) {
        Ok(e) => {
            let residual: Vec<SparseColumn<BigInt>> = e
                .residual
                .into_iter()
                .map(|col| col.into_iter().map(|(r, v)| (r, BigInt::from(v))).collect())
                .collect();
            SmithForm::from_parts(e.unit_rank, &residual)
        }
        Err(Overflow) => {
            let big = cols
                .iter()
                .map(|col| col.iter().map(|&(r, v)| (r, BigInt::from(v))).collect())
                .collect();
            let e = eliminate::<BigInt>(nrows, big).expect("bigint elimination cannot overflow");
            SmithForm::from_parts(e.unit_rank, &e.residual)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
}

impl SmithForm {
    fn from_parts(unit_rank: usize, residual: &[SparseColumn<BigInt>]) -> Self {
        let factors = super::snf::invariant_factors_sparse(residual);
        let rank = unit_rank + factors.len();
        let torsion = factors.into_iter().filter(|d| !d.is_one()).collect();
        Self { rank, torsion }
    }
}
