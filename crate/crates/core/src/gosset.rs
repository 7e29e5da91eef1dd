//! The right-angled polytope dual to the Gosset polytope `4_21`.
//!
//! Facets are the 240 minimal vectors of `E_8`, two facets are adjacent when
//! the vectors have inner product 1 (edges of `4_21`), finite vertices are the
//! 8-cliques of that graph (simplex facets of `4_21`), and ideal vertices are
//! the norm-4 vectors `w` of `E_8`: the link facets are the 14 roots `r` with
//! `r . w = 2`, paired as `(r, w - r)` (a cross-polytope facet of `4_21`).
//!
//! Vectors are stored with doubled coordinates so that every entry is an
//! integer; doubled inner products are four times the true ones.

use std::collections::BTreeSet;

use crate::polytope::{Colouring, IdealVertex, Polytope};

pub type Root = [i8; 8];

fn dot(a: &Root, b: &Root) -> i32 {
    a.iter().zip(b).map(|(&x, &y)| x as i32 * y as i32).sum()
}

/// The 240 roots of `E_8` in doubled coordinates, sorted.
pub fn e8_roots() -> Vec<Root> {
    let mut roots = Vec::with_capacity(240);
    for i in 0..8 {
        for j in i + 1..8 {
            for si in [-2i8, 2] {
                for sj in [-2i8, 2] {
                    let mut r = [0i8; 8];
                    r[i] = si;
                    r[j] = sj;
                    roots.push(r);
                }
            }
        }
    }
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            let mut r = [1i8; 8];
            for (k, x) in r.iter_mut().enumerate() {
                if mask >> k & 1 == 1 {
                    *x = -1;
                }
            }
            roots.push(r);
        }
    }
    roots.sort_unstable();
    roots
}

type Mask = [u64; 4];

fn mask_with(indices: impl IntoIterator<Item = usize>) -> Mask {
    let mut m = [0u64; 4];
    for i in indices {
        m[i >> 6] |= 1 << (i & 63);
    }
    m
}

fn extend_cliques(clique: &mut Vec<u32>, candidates: Mask, adjacency: &[Mask], size: usize, out: &mut Vec<Vec<u32>>) {
    if clique.len() == size {
        out.push(clique.clone());
        return;
    }
    for word in 0..4 {
        let mut bits = candidates[word];
        while bits != 0 {
            let t = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let v = word * 64 + t;
            let mut next = [0u64; 4];
            for k in 0..4 {
                next[k] = candidates[k] & adjacency[v][k];
            }
            // keep only candidates above v so each clique is produced once
            for (k, w) in next.iter_mut().enumerate() {
                if k < word {
                    *w = 0;
                } else if k == word {
                    *w &= if t == 63 { 0 } else { !0u64 << (t + 1) };
                }
            }
            clique.push(v as u32);
            extend_cliques(clique, next, adjacency, size, out);
            clique.pop();
        }
    }
}

/// Builds the polytope together with the root labelling its facets.
pub fn gosset_p8_with_roots() -> (Polytope, Vec<Root>) {
    let roots = e8_roots();
    let m = roots.len();
    let mut adjacency = Vec::new();
    let mut adj_masks = vec![[0u64; 4]; m];
    for a in 0..m {
        for b in a + 1..m {
            if dot(&roots[a], &roots[b]) == 4 {
                adjacency.push((a as u32, b as u32));
                adj_masks[a][b >> 6] |= 1 << (b & 63);
                adj_masks[b][a >> 6] |= 1 << (a & 63);
            }
        }
    }

    let mut finite = Vec::new();
    extend_cliques(&mut Vec::new(), mask_with(0..m), &adj_masks, 8, &mut finite);

    let mut shell: BTreeSet<Root> = BTreeSet::new();
    for a in 0..m {
        for b in a + 1..m {
            if dot(&roots[a], &roots[b]) == 0 {
                let mut w = [0i8; 8];
                for k in 0..8 {
                    w[k] = roots[a][k] + roots[b][k];
                }
                shell.insert(w);
            }
        }
    }
    let index_of = |r: &Root| roots.binary_search(r).expect("root") as u32;
    let ideal = shell
        .iter()
        .map(|w| {
            let mut pairs = Vec::with_capacity(7);
            for r in &roots {
                if dot(r, w) == 8 {
                    let mut opp = [0i8; 8];
                    for k in 0..8 {
                        opp[k] = w[k] - r[k];
                    }
                    let (a, b) = (index_of(r), index_of(&opp));
                    if a < b {
                        pairs.push([a, b]);
                    }
                }
            }
            IdealVertex { pairs }
        })
        .collect();

    let polytope = Polytope::new(8, m, adjacency, finite, ideal).expect("indices in range");
    (polytope, roots)
}

pub fn gosset_p8() -> Polytope {
    gosset_p8_with_roots().0
}

/// Colour of a root in the 15-colouring by orthogonal frames.
///
/// Coordinates are indexed by `F_2^3`. An integer root `+-e_i +- e_j` gets
/// colour `i xor j` in `1..=7`. A half-integer root is a sign function
/// `f: F_2^3 -> F_2` of even weight, hence of degree at most two; it gets
/// colour `8 + q` where `q` encodes the three quadratic coefficients of `f`,
/// i.e. its coset modulo the extended Hamming code.
pub fn frame_colour(root: &Root) -> u32 {
    if root.contains(&0) {
        let support: Vec<usize> = (0..8).filter(|&k| root[k] != 0).collect();
        (support[0] ^ support[1]) as u32
    } else {
        let f = |x: usize| u32::from(root[x] < 0);
        let c01 = f(0) ^ f(1) ^ f(2) ^ f(3);
        let c02 = f(0) ^ f(1) ^ f(4) ^ f(5);
        let c12 = f(0) ^ f(2) ^ f(4) ^ f(6);
        8 + c01 + 2 * c02 + 4 * c12
    }
}

/// The 15-colouring of the Gosset polytope with each colour class an
/// orthogonal frame of 16 roots.
pub fn frame_colouring(roots: &[Root]) -> Colouring {
    Colouring::new(15, roots.iter().map(frame_colour).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_census() {
        let roots = e8_roots();
        assert_eq!(roots.len(), 240);
        assert!(roots.iter().all(|r| dot(r, r) == 8));
        assert_eq!(roots.iter().filter(|r| r.contains(&0)).count(), 112);
    }

    #[test]
    fn frames_are_orthogonal() {
        let roots = e8_roots();
        for a in &roots {
            for b in &roots {
                if frame_colour(a) == frame_colour(b) {
                    assert!(matches!(dot(a, b), 0 | 8 | -8), "{a:?} {b:?}");
                }
            }
        }
    }
}
