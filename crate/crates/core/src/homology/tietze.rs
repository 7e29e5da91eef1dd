//! Edge-path group presentations and Tietze simplification.
//!
//! Generators are the edges outside a spanning tree, relators come from the
//! triangles. A generator occurring exactly once in some relator is solved
//! for and substituted away; relators are processed shortest first. The
//! group is certified trivial once every generator has been eliminated.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use super::{certify_contractible, Certificate, SimplicialComplex};
use crate::error::{Error, Result};

pub const DEFAULT_TIETZE_BUDGET: usize = 10_000;

/// Longest word substituted for an eliminated generator.
const MAX_SUBSTITUTION: usize = 32;

/// A finite presentation; generator `g` is written `g` (1-based) and its
/// inverse `-g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TietzeOutcome {
    Trivial {
        moves: usize,
    },
    Stuck {
        generators: usize,
        relators: usize,
        moves: usize,
    },
    BudgetExhausted {
        moves: usize,
    },
}

fn reduce(word: &mut Vec<i32>) {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &x in word.iter() {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    let (mut lo, mut hi) = (0, out.len());
    while hi - lo >= 2 && out[lo] == -out[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    word.clear();
    word.extend_from_slice(&out[lo..hi]);
}

fn inverse(word: &[i32]) -> Vec<i32> {
    word.iter().rev().map(|&x| -x).collect()
}

impl Presentation {
    pub fn simplify(&self, budget: usize) -> TietzeOutcome {
        let n = self.generators;
        let mut rels: Vec<Vec<i32>> = self.relators.clone();
        let mut occ: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        let mut heap = BinaryHeap::new();
        for (j, r) in rels.iter_mut().enumerate() {
            reduce(r);
            for &x in r.iter() {
                occ[x.unsigned_abs() as usize].push(j as u32);
            }
            heap.push(Reverse((r.len(), j)));
        }
        let mut rel_alive = vec![true; rels.len()];
        let mut gen_alive = vec![true; n + 1];
        let mut remaining = n;
        let mut moves = 0;
        let mut stamp = vec![usize::MAX; rels.len()];

        while let Some(Reverse((len, j))) = heap.pop() {
            if remaining == 0 {
                break;
            }
            if !rel_alive[j] || rels[j].len() != len {
                continue;
            }
            if len == 0 {
                rel_alive[j] = false;
                continue;
            }
            let word = &rels[j];
            let once = |g: u32| word.iter().filter(|x| x.unsigned_abs() == g).count() == 1;
            let choice = word
                .iter()
                .enumerate()
                .filter(|(_, x)| once(x.unsigned_abs()))
                .min_by_key(|(_, x)| occ[x.unsigned_abs() as usize].len())
                .map(|(p, &x)| (p, x));
            let Some((p, x)) = choice else { continue };
            if len - 1 > MAX_SUBSTITUTION {
                continue;
            }
            if moves == budget {
                return TietzeOutcome::BudgetExhausted { moves };
            }
            moves += 1;
            // word ~ x W cyclically, so x = W^-1
            let mut rest: Vec<i32> = word[p + 1..].to_vec();
            rest.extend_from_slice(&word[..p]);
            let value = if x > 0 { inverse(&rest) } else { rest };
            let value_inv = inverse(&value);
            let g = x.unsigned_abs() as usize;
            rel_alive[j] = false;
            gen_alive[g] = false;
            remaining -= 1;
            let targets = std::mem::take(&mut occ[g]);
            for i in targets {
                let i = i as usize;
                if i == j || !rel_alive[i] || stamp[i] == moves {
                    continue;
                }
                stamp[i] = moves;
                let mut next = Vec::with_capacity(rels[i].len() + value.len());
                for &y in &rels[i] {
                    if y.unsigned_abs() as usize == g {
                        next.extend_from_slice(if y > 0 { &value } else { &value_inv });
                    } else {
                        next.push(y);
                    }
                }
                reduce(&mut next);
                for &y in &value {
                    occ[y.unsigned_abs() as usize].push(i as u32);
                }
                heap.push(Reverse((next.len(), i)));
                rels[i] = next;
            }
        }
        if remaining == 0 {
            TietzeOutcome::Trivial { moves }
        } else {
            TietzeOutcome::Stuck {
                generators: remaining,
                relators: rel_alive
                    .iter()
                    .zip(&rels)
                    .filter(|(a, r)| **a && !r.is_empty())
                    .count(),
                moves,
            }
        }
    }
}

/// Presentation of the edge-path group of a connected complex, based at its
/// smallest vertex.
pub fn edge_path_presentation(complex: &SimplicialComplex) -> Result<Presentation> {
    let verts = complex.vertices();
    if verts.is_empty() {
        return Err(Error::Input("empty complex".into()));
    }
    let local = |v: u32| verts.binary_search(&v).expect("vertex");
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); verts.len()];
    for (e, s) in complex.simplices(1).enumerate() {
        let (a, b) = (local(s[0]), local(s[1]));
        adjacency[a].push((b, e));
        adjacency[b].push((a, e));
    }
    let mut in_tree = vec![false; complex.count(1)];
    let mut seen = vec![false; verts.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(a) = queue.pop_front() {
        for &(b, e) in &adjacency[a] {
            if !seen[b] {
                seen[b] = true;
                in_tree[e] = true;
                queue.push_back(b);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Disconnected);
    }
    let mut generator = vec![0i32; complex.count(1)];
    let mut next = 0;
    for (e, t) in in_tree.iter().enumerate() {
        if !t {
            next += 1;
            generator[e] = next;
        }
    }
    let edge = |a: u32, b: u32| generator[complex.index_of(&[a, b]).expect("edge of triangle")];
    let relators = complex
        .simplices(2)
        .map(|t| {
            [edge(t[0], t[1]), edge(t[1], t[2]), -edge(t[0], t[2])]
                .into_iter()
                .filter(|&x| x != 0)
                .collect()
        })
        .collect();
    Ok(Presentation {
        generators: next as usize,
        relators,
    })
}

/// Certifies simple connectivity by a collapse to a point (complete
/// complexes only) or by Tietze reduction of the edge-path presentation.
pub fn certify_simply_connected(complex: &SimplicialComplex, budget: usize) -> Result<Certificate> {
    if complex.is_empty() {
        return Err(Error::Input("empty complex".into()));
    }
    if complex.num_components() != 1 {
        return Err(Error::Disconnected);
    }
    let presentation = edge_path_presentation(complex)?;
    if let TietzeOutcome::Trivial { .. } = presentation.simplify(budget) {
        return Ok(Certificate::Certified);
    }
    if complex.truncated_above().is_none() {
        return certify_contractible(complex);
    }
    Ok(Certificate::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction() {
        let mut w = vec![1, 2, -2, 3, -1];
        reduce(&mut w);
        assert_eq!(w, vec![3]);
    }

    #[test]
    fn free_group_is_stuck() {
        let p = Presentation {
            generators: 2,
            relators: vec![vec![1, 2, -1, -2]],
        };
        assert!(matches!(p.simplify(100), TietzeOutcome::Stuck { generators: 2, .. }));
    }

    #[test]
    fn chain_of_substitutions() {
        // a = b, b = c^-1, c = 1
        let p = Presentation {
            generators: 3,
            relators: vec![vec![1, -2], vec![2, 3], vec![3]],
        };
        assert_eq!(p.simplify(100), TietzeOutcome::Trivial { moves: 3 });
        assert_eq!(p.simplify(1), TietzeOutcome::BudgetExhausted { moves: 1 });
    }

    #[test]
    fn z2_is_not_certified() {
        let p = Presentation {
            generators: 1,
            relators: vec![vec![1, 1]],
        };
        assert!(matches!(p.simplify(100), TietzeOutcome::Stuck { .. }));
    }
}
