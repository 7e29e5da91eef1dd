//! Dense Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::sparse::SparseColumn;

/// Invariant factors (positive, nonzero, in divisibility order) of a dense
/// row-major matrix.
pub fn invariant_factors(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut done = true;
            for i in t + 1..rows {
                if !m[i][t].is_zero() {
                    let q = m[i][t].div_floor(&m[t][t]);
                    for j in t..cols {
                        let v = &m[t][j] * &q;
                        m[i][j] -= v;
                    }
                    if !m[i][t].is_zero() {
                        done = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !m[t][j].is_zero() {
                    let q = m[t][j].div_floor(&m[t][t]);
                    for i in t..rows {
                        let v = &m[i][t] * &q;
                        m[i][j] -= v;
                    }
                    if !m[t][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                // divisibility: fold a non-multiple from the block into row t
                let bad =
                    (t + 1..rows).find_map(|i| (t + 1..cols).find(|&j| !(&m[i][j] % &m[t][t]).is_zero()).map(|_| i));
                match bad {
                    Some(i) => {
                        for j in t..cols {
                            let v = m[i][j].clone();
                            m[t][j] += v;
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest nonzero entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..rows {
                if !m[i][t].is_zero() && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !m[t][j].is_zero() && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

pub(crate) fn invariant_factors_sparse(cols: &[SparseColumn<BigInt>]) -> Vec<BigInt> {
    if cols.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<u32> = cols.iter().flatten().map(|e| e.0).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut dense = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
    for (j, col) in cols.iter().enumerate() {
        for (r, v) in col {
            let i = rows.binary_search(r).expect("row present");
            dense[i][j] = v.clone();
        }
    }
    invariant_factors(dense)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn classic_examples() {
        assert_eq!(invariant_factors(m(&[&[2, 0], &[0, 3]])), ints(&[1, 6]));
        assert_eq!(
            invariant_factors(m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])),
            ints(&[2, 6, 12])
        );
        assert_eq!(invariant_factors(m(&[&[0, 0], &[0, 0]])), ints(&[]));
        assert_eq!(invariant_factors(m(&[&[4, 6]])), ints(&[2]));
    }
}
