use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polytope::{Colouring, Polytope};
use crate::unionfind::UnionFind;

/// Largest palette accepted by [`choi_park_b1`].
pub const MAX_CHOI_PARK_PALETTE: usize = 24;

/// First Betti number of the coloured manifold: the sum over nonempty colour
/// sets `w` of the reduced `b_0` of the full subcomplex of the nerve on the
/// facets whose colour lies in `w`.
pub fn choi_park_b1(polytope: &Polytope, colouring: &Colouring) -> Result<u64> {
    let c = colouring.palette();
    if c > MAX_CHOI_PARK_PALETTE {
        return Err(Error::PaletteTooLarge(c, MAX_CHOI_PARK_PALETTE));
    }
    let n = polytope.num_facets();
    let bits: Vec<u32> = (0..n as u32).map(|f| colouring.bit(f) as u32).collect();
    // edges grouped by colour pair, so each w only scans edges it keeps
    let mut by_pair: Vec<Vec<(u32, u32)>> = vec![Vec::new(); c * c];
    for (a, b) in polytope.adjacent_pairs() {
        let (x, y) = (colouring.colour(a) as usize - 1, colouring.colour(b) as usize - 1);
        by_pair[x.min(y) * c + x.max(y)].push((a, b));
    }
    let pairs: Vec<(u32, Vec<(u32, u32)>)> = by_pair
        .into_iter()
        .enumerate()
        .filter(|(_, e)| !e.is_empty())
        .map(|(i, e)| ((1u32 << (i / c)) | (1u32 << (i % c)), e))
        .collect();
    let total = (1u32..1 << c)
        .into_par_iter()
        .map(|w| {
            let facets: Vec<usize> = (0..n).filter(|&f| bits[f] & w != 0).collect();
            if facets.is_empty() {
                return 0u64;
            }
            let mut local = vec![u32::MAX; n];
            for (i, &f) in facets.iter().enumerate() {
                local[f] = i as u32;
            }
            let mut uf = UnionFind::new(facets.len());
            for (mask, edges) in &pairs {
                if mask & w == *mask {
                    for &(a, b) in edges {
                        uf.union(local[a as usize] as usize, local[b as usize] as usize);
                    }
                }
            }
            uf.components() as u64 - 1
        })
        .sum();
    Ok(total)
}
