//! Independent reference implementations used by the property suites.
//!
//! Everything here is deliberately naive: dense matrices, explicit face
//! enumeration, walks one edge at a time and box enumeration of lattice
//! vectors. None of it shares code with the library beyond input types.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use cubist::characters::Gram;
use cubist::game::{Moves, State, Status};
use cubist::polytope::Colouring;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// All nonempty faces of the given simplices, grouped by dimension, each
/// level sorted.
pub fn all_faces(simplices: &[Vec<u32>]) -> Vec<Vec<Vec<u32>>> {
    let mut levels: Vec<BTreeSet<Vec<u32>>> = Vec::new();
    for s in simplices {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        let n = s.len();
        for mask in 1u32..1 << n {
            let face: Vec<u32> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            let d = face.len() - 1;
            if levels.len() <= d {
                levels.resize_with(d + 1, BTreeSet::new);
            }
            levels[d].insert(face);
        }
    }
    levels.into_iter().map(|l| l.into_iter().collect()).collect()
}

/// Dense signed boundary matrix `d_k` (rows: (k-1)-faces, columns: k-faces).
pub fn dense_boundary(faces: &[Vec<Vec<u32>>], k: usize) -> Vec<Vec<i64>> {
    let rows = &faces[k - 1];
    let cols = &faces[k];
    let mut m = vec![vec![0i64; cols.len()]; rows.len()];
    for (j, s) in cols.iter().enumerate() {
        for omit in 0..s.len() {
            let face: Vec<u32> = s
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != omit)
                .map(|(_, &v)| v)
                .collect();
            let i = rows.binary_search(&face).expect("face present");
            m[i][j] = if omit % 2 == 0 { 1 } else { -1 };
        }
    }
    m
}

/// Rank over Q by exact Gaussian elimination.
pub fn rank_q(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for cc in c..cols {
                    let delta = &f * &a[rank][cc];
                    a[r][cc] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over Z/2.
pub fn rank_z2(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<bool>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(2) == 1).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c]) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && a[r][c] {
                for cc in c..cols {
                    let x = a[rank][cc];
                    a[r][cc] ^= x;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers `b_0..=b_up_to` of the complex generated by `simplices`.
pub fn dense_betti(simplices: &[Vec<u32>], up_to: usize, z2: bool) -> Vec<usize> {
    let faces = all_faces(simplices);
    let rank = |k: usize| -> usize {
        if k == 0 || k >= faces.len() {
            return 0;
        }
        let m = dense_boundary(&faces, k);
        if z2 {
            rank_z2(&m)
        } else {
            rank_q(&m)
        }
    };
    (0..=up_to)
        .map(|k| faces.get(k).map_or(0, Vec::len) - rank(k) - rank(k + 1))
        .collect()
}

/// Statuses after walking from the base vertex along `path`, flipping at
/// each step every facet whose colour shares a move with the colour crossed.
pub fn walk_statuses(colouring: &Colouring, state: &State, moves: &Moves, path: &[u32]) -> Vec<Status> {
    let mut cur = state.stati().to_vec();
    for &crossed in path {
        for (f, s) in cur.iter_mut().enumerate() {
            if moves.same_move(colouring.colour(f as u32), crossed) {
                *s = s.flipped();
            }
        }
    }
    cur
}

/// Vertex reached from the base vertex along `path` of colours.
pub fn walk_vertex(path: &[u32]) -> u64 {
    path.iter().fold(0u64, |v, &c| v ^ 1 << (c - 1))
}

/// Gram matrix with integer entries as a dense `i64` table.
pub fn integer_gram(g: &Gram) -> Vec<Vec<i64>> {
    g.entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    assert!(x.is_integer(), "integer Gram expected");
                    x.to_integer().to_i64().expect("small entry")
                })
                .collect()
        })
        .collect()
}

fn quad(g: &[Vec<i64>], x: &[i64]) -> i64 {
    (0..x.len())
        .map(|i| (0..x.len()).map(|j| x[i] * g[i][j] * x[j]).sum::<i64>())
        .sum()
}

/// Coordinate bound `|x_i| <= sqrt(r2 * (G^-1)_ii)`, rounded outward.
fn box_bound(g: &[Vec<i64>], r2: f64) -> Vec<i64> {
    let n = g.len();
    // invert in f64 by Gauss-Jordan; only used to size the search box
    let mut a: Vec<Vec<f64>> = g
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<f64> = r.iter().map(|&x| x as f64).collect();
            row.extend((0..n).map(|j| (i == j) as u8 as f64));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        let d = a[c][c];
        for v in a[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                for cc in 0..2 * n {
                    a[r][cc] -= f * a[c][cc];
                }
            }
        }
    }
    (0..n)
        .map(|i| (r2 * a[i][n + i]).max(0.0).sqrt().floor() as i64 + 1)
        .collect()
}

/// Every nonzero integer vector of squared length at most `r2`, by
/// enumerating the whole bounding box.
pub fn box_enumerate(g: &[Vec<i64>], r2: i64) -> Vec<(Vec<i64>, i64)> {
    let bound = box_bound(g, r2 as f64);
    let n = g.len();
    let mut out = Vec::new();
    let mut x: Vec<i64> = bound.iter().map(|&b| -b).collect();
    loop {
        if x.iter().any(|&c| c != 0) {
            let q = quad(g, &x);
            if q <= r2 {
                out.push((x.clone(), q));
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if x[i] < bound[i] {
                x[i] += 1;
                break;
            }
            x[i] = -bound[i];
            i += 1;
        }
    }
}

/// Squared minimum of an integral positive definite form, by enumerating
/// balls of radius 1, 2, 4, ... until one contains a nonzero vector.
pub fn double_radius_minimum(g: &[Vec<i64>]) -> i64 {
    let mut r2 = 1i64;
    loop {
        let found = box_enumerate(g, r2);
        if let Some(m) = found.iter().map(|&(_, q)| q).min() {
            return m;
        }
        r2 *= 2;
    }
}

/// `B G B^T` for integer rows `B`.
pub fn restrict_gram(g: &[Vec<i64>], basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    basis
        .iter()
        .map(|u| {
            basis
                .iter()
                .map(|w| {
                    (0..u.len())
                        .map(|i| (0..w.len()).map(|j| u[i] * g[i][j] * w[j]).sum::<i64>())
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// `x` normalised so its first nonzero coordinate is positive.
pub fn canonical_sign(mut x: Vec<i64>) -> Vec<i64> {
    if x.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
        x.iter_mut().for_each(|c| *c = -*c);
    }
    x
}
