//! Greedy elementary collapses.

use std::collections::VecDeque;

use super::{Certificate, SimplicialComplex};
use crate::error::{Error, Result};

/// Tries to collapse `complex` to a single vertex by repeatedly removing a
/// free face together with the unique simplex containing it. `Unknown` only
/// means the greedy order got stuck; it is never a proof of non-contractibility.
pub fn certify_contractible(complex: &SimplicialComplex) -> Result<Certificate> {
    if complex.is_empty() {
        return Err(Error::Input("empty complex".into()));
    }
    if let Some(d) = complex.truncated_above() {
        return Err(Error::DimensionBound {
            built: d,
            needed: d + 1,
        });
    }
    let top = complex.dim().expect("nonempty");
    let mut offset = vec![0usize; top + 2];
    for k in 0..=top {
        offset[k + 1] = offset[k] + complex.count(k);
    }
    let total = offset[top + 1];
    // faces[g] lists global ids of the codimension-1 faces of simplex g
    let mut faces: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut cofaces: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut face = Vec::new();
    for k in 1..=top {
        for (i, s) in complex.simplices(k).enumerate() {
            let g = offset[k] + i;
            for skip in 0..=k {
                face.clear();
                face.extend(s.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v));
                let f = offset[k - 1] + complex.index_of(&face).expect("closed under faces");
                faces[g].push(f as u32);
                cofaces[f].push(g as u32);
            }
        }
    }
    let mut alive = vec![true; total];
    let mut live_cofaces: Vec<u32> = cofaces.iter().map(|c| c.len() as u32).collect();
    let mut remaining = total;
    let mut queue: VecDeque<u32> = (0..total as u32).filter(|&g| live_cofaces[g as usize] == 1).collect();

    while let Some(sigma) = queue.pop_front() {
        let sigma = sigma as usize;
        if !alive[sigma] || live_cofaces[sigma] != 1 {
            continue;
        }
        let tau = cofaces[sigma]
            .iter()
            .copied()
            .find(|&t| alive[t as usize])
            .expect("one live coface") as usize;
        alive[sigma] = false;
        alive[tau] = false;
        remaining -= 2;
        for &f in faces[tau].iter().chain(&faces[sigma]) {
            let f = f as usize;
            if f == sigma || !alive[f] {
                continue;
            }
            live_cofaces[f] -= 1;
            if live_cofaces[f] == 1 {
                queue.push_back(f as u32);
            }
        }
    }
    Ok(if remaining == 1 {
        Certificate::Certified
    } else {
        Certificate::Unknown
    })
}
