use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A positive-definite symmetric rational matrix: the flat metric of a cusp
/// torus in the basis of its loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gram {
    entries: Vec<Vec<BigRational>>,
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl Gram {
    pub fn new(entries: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = entries.len();
        if entries.iter().any(|row| row.len() != r) {
            return Err(Error::Shape("Gram matrix is not square".into()));
        }
        for i in 0..r {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::Shape(format!("Gram matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        let g = Self { entries };
        if !g.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(g)
    }

    pub fn identity(rank: usize) -> Self {
        Self::diagonal(&vec![1; rank])
    }

    /// Diagonal Gram matrix; entries must be positive.
    pub fn diagonal(d: &[i64]) -> Self {
        assert!(d.iter().all(|&x| x > 0), "diagonal entries must be positive");
        let entries = (0..d.len())
            .map(|i| {
                (0..d.len())
                    .map(|j| if i == j { rat(d[i]) } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        Self { entries }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    pub fn scaled(&self, k: &BigRational) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|row| row.iter().map(|x| x * k).collect())
                .collect(),
        )
    }

    /// Squared length `x^T G x`.
    pub fn norm2(&self, x: &[i64]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0 {
                    s += &self.entries[i][j] * rat(xi * xj);
                }
            }
        }
        s
    }

    /// Gram matrix of the sublattice spanned by the rows of `basis`.
    pub fn restrict(&self, basis: &[Vec<i64>]) -> Result<Self> {
        let m = basis.len();
        let mut out = vec![vec![BigRational::zero(); m]; m];
        for a in 0..m {
            for b in a..m {
                let mut s = BigRational::zero();
                for i in 0..self.rank() {
                    for j in 0..self.rank() {
                        let w = basis[a][i] * basis[b][j];
                        if w != 0 {
                            s += &self.entries[i][j] * rat(w);
                        }
                    }
                }
                out[a][b] = s.clone();
                out[b][a] = s;
            }
        }
        Self::new(out)
    }

    fn is_positive_definite(&self) -> bool {
        // exact LDL^T: every pivot must be positive
        let r = self.rank();
        let mut a = self.entries.clone();
        for k in 0..r {
            if !a[k][k].is_positive() {
                return false;
            }
            for i in k + 1..r {
                let f = &a[i][k] / &a[k][k];
                for j in k..r {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
            }
        }
        true
    }

    fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

/// All nonzero integer vectors of squared length at most `radius2`, one of
/// each `+-` pair (first nonzero coordinate positive), sorted by length and
/// then lexicographically.
pub fn short_vectors(gram: &Gram, radius2: &BigRational) -> Vec<(Vec<i64>, BigRational)> {
    let r = gram.rank();
    if r == 0 || radius2.is_negative() {
        return Vec::new();
    }
    // Cholesky-style decomposition q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    let a = gram.to_f64();
    let mut q = a.clone();
    for i in 0..r {
        for j in i + 1..r {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..r {
            for l in k..r {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let bound = radius2.to_f64().unwrap_or(f64::INFINITY);
    let slack = bound * 1e-9 + 1e-9;
    let mut out = Vec::new();
    let mut x = vec![0i64; r];
    enumerate(&q, r, r, bound + slack, &mut x, &mut |x| {
        if let Some(first) = x.iter().find(|&&v| v != 0) {
            if *first > 0 {
                let n = gram.norm2(x);
                if &n <= radius2 {
                    out.push((x.to_vec(), n));
                }
            }
        }
    });
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Depth-first enumeration of coordinates `x_{level-1}, ..., x_0`.
fn enumerate(q: &[Vec<f64>], r: usize, level: usize, remaining: f64, x: &mut [i64], visit: &mut impl FnMut(&[i64])) {
    if level == 0 {
        visit(x);
        return;
    }
    let i = level - 1;
    let centre: f64 = -(i + 1..r).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let half = (remaining.max(0.0) / q[i][i]).sqrt();
    let lo = (centre - half).ceil() as i64;
    let hi = (centre + half).floor() as i64;
    for v in lo..=hi {
        let d = v as f64 - centre;
        let used = q[i][i] * d * d;
        if used <= remaining + 1e-12 {
            x[i] = v;
            enumerate(q, r, i, remaining - used, x, visit);
        }
    }
    x[i] = 0;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelLattice {
    /// Rows span `{x : sum x_i v_i = 0}`.
    pub basis: Vec<Vec<i64>>,
    /// The values were all zero, so the kernel is everything.
    pub all_zero: bool,
    pub gcd: i64,
}

fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

fn checked(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Input("integer overflow in lattice reduction".into()))
}

/// Basis of the integer kernel of `x -> sum x_i values_i`, by unimodular
/// column reduction of the row vector.
pub fn kernel_sublattice(values: &[i64]) -> Result<KernelLattice> {
    let r = values.len();
    let mut a: Vec<i128> = values.iter().map(|&v| v as i128).collect();
    let mut cols: Vec<Vec<i128>> = (0..r).map(|i| (0..r).map(|j| (i == j) as i128).collect()).collect();
    while let Some(p) = (0..r).filter(|&j| a[j] != 0).min_by_key(|&j| a[j].abs()) {
        let mut changed = false;
        for k in 0..r {
            if k != p && a[k] != 0 {
                let q = floor_div(a[k], a[p]);
                a[k] -= q * a[p];
                let colp = cols[p].clone();
                for (x, y) in cols[k].iter_mut().zip(colp) {
                    *x -= q * y;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let pivot = (0..r).find(|&j| a[j] != 0);
    let mut basis = Vec::with_capacity(r);
    for (j, col) in cols.into_iter().enumerate() {
        if Some(j) == pivot {
            continue;
        }
        let mut v = col.into_iter().map(checked).collect::<Result<Vec<i64>>>()?;
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        basis.push(v);
    }
    basis.sort();
    Ok(KernelLattice {
        basis,
        all_zero: pivot.is_none(),
        gcd: pivot.map_or(0, |p| a[p].abs() as i64),
    })
}

/// Row Hermite normal form: a canonical basis of the lattice spanned by the
/// rows, so two bases span the same lattice iff their forms agree.
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut out: Vec<Vec<i128>> = Vec::new();
    for col in 0..width {
        // gcd-combine all remaining rows with a nonzero entry in this column
        loop {
            let nz: Vec<usize> = (0..m.len()).filter(|&i| m[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][col].abs()).expect("nonempty");
            for &i in &nz {
                if i != p {
                    let q = floor_div(m[i][col], m[p][col]);
                    let rp = m[p].clone();
                    for (x, y) in m[i].iter_mut().zip(rp) {
                        *x -= q * y;
                    }
                }
            }
        }
        if let Some(i) = (0..m.len()).find(|&i| m[i][col] != 0) {
            let mut row = m.swap_remove(i);
            if row[col] < 0 {
                row.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(row);
        }
        m.retain(|r| r.iter().any(|&x| x != 0));
    }
    // reduce entries above each pivot into [0, pivot)
    for k in 0..out.len() {
        let col = out[k].iter().position(|&x| x != 0).expect("nonzero row");
        let piv = out[k][col];
        for i in 0..k {
            let q = floor_div(out[i][col], piv);
            if q != 0 {
                let rk = out[k].clone();
                for (x, y) in out[i].iter_mut().zip(rk) {
                    *x -= q * y;
                }
            }
        }
    }
    out.into_iter().map(|r| r.into_iter().map(checked).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Systole {
    #[serde(serialize_with = "ser_rational")]
    pub squared: BigRational,
    pub length: f64,
    /// A shortest vector, in ambient coordinates.
    pub vector: Vec<i64>,
}

pub(crate) fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Length of a shortest nonzero vector of the sublattice spanned by the
/// rows of `basis`; `None` for the zero lattice.
pub fn systole(gram: &Gram, basis: &[Vec<i64>]) -> Result<Option<Systole>> {
    if basis.is_empty() {
        return Ok(None);
    }
    if basis.iter().any(|b| b.len() != gram.rank()) {
        return Err(Error::Shape("basis vectors do not match the Gram rank".into()));
    }
    let sub = gram.restrict(basis)?;
    let bound = (0..sub.rank())
        .map(|i| sub.entries()[i][i].clone())
        .min()
        .expect("nonempty basis");
    let (y, squared) = short_vectors(&sub, &bound)
        .into_iter()
        .next()
        .expect("a basis vector lies within the bound");
    let vector = (0..gram.rank())
        .map(|i| y.iter().zip(basis).map(|(&c, b)| c * b[i]).sum())
        .collect();
    Ok(Some(Systole {
        length: squared.to_f64().unwrap_or(f64::NAN).sqrt(),
        squared,
        vector,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoPiResult {
    pub cusp: usize,
    pub pass: bool,
    /// `None` when the kernel is zero (no closed geodesic to fill).
    pub systole: Option<f64>,
    pub reason: Option<String>,
}

/// Scales a rational vector to a primitive-direction integer vector.
pub(crate) fn integral_direction(values: &[BigRational]) -> Result<Vec<i64>> {
    let lcm = values.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    values
        .iter()
        .map(|v| {
            (v.numer() * (&lcm / v.denom()))
                .to_i64()
                .ok_or_else(|| Error::Input("character value too large".into()))
        })
        .collect()
}

/// For each cusp, whether the kernel subtorus of the character has every
/// closed geodesic longer than `2 pi`.
pub fn two_pi_check(values: &[Vec<BigRational>], grams: &[Gram]) -> Result<Vec<TwoPiResult>> {
    if values.len() != grams.len() {
        return Err(Error::Shape(format!(
            "{} cusps but {} Gram matrices",
            values.len(),
            grams.len()
        )));
    }
    let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    values
        .iter()
        .zip(grams)
        .enumerate()
        .map(|(cusp, (v, g))| {
            let ints = integral_direction(v)?;
            let kernel = kernel_sublattice(&ints)?;
            if kernel.all_zero {
                return Ok(TwoPiResult {
                    cusp,
                    pass: false,
                    systole: None,
                    reason: Some("trivial on cusp".into()),
                });
            }
            let sys = systole(g, &kernel.basis)?;
            let pass = sys
                .as_ref()
                .is_none_or(|s| s.squared.to_f64().unwrap_or(0.0) > four_pi2);
            Ok(TwoPiResult {
                cusp,
                pass,
                systole: sys.map(|s| s.length),
                reason: (!pass).then(|| "kernel systole at most 2 pi".to_string()),
            })
        })
        .collect()
}
