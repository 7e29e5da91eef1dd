use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::lattice::{
    hermite_normal_form, integral_direction, kernel_sublattice, ser_rational, short_vectors, systole, Gram,
};
use crate::error::{Error, Result};

/// Restrictions of a character to the cusps: one value per cusp loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub values: Vec<Vec<BigRational>>,
}

impl Character {
    pub fn new(values: Vec<Vec<BigRational>>) -> Self {
        Self { values }
    }

    pub fn from_integers(values: &[Vec<i64>]) -> Self {
        Self::new(
            values
                .iter()
                .map(|v| v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
    }

    pub fn num_cusps(&self) -> usize {
        self.values.len()
    }

    /// Value on the cusp-`s` lattice vector `x`.
    pub fn value(&self, cusp: usize, x: &[i64]) -> BigRational {
        self.values[cusp]
            .iter()
            .zip(x)
            .filter(|(_, &c)| c != 0)
            .map(|(v, &c)| v * BigInt::from(c))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    fn axpy(&self, lambda: &BigRational, other: &Character) -> Character {
        Character::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + lambda * y).collect())
                .collect(),
        )
    }

    fn same_shape(&self, other: &Character) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a.len() == b.len())
    }
}

#[derive(Clone, Debug)]
pub struct PerturbOptions {
    /// Grid of coefficients `p/q` with `|p| <= max_numerator`, `1 <= q <= max_denominator`.
    pub max_numerator: i64,
    pub max_denominator: i64,
    pub max_candidates: u64,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        Self {
            max_numerator: 4,
            max_denominator: 4,
            max_candidates: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspCertificate {
    pub cusp: usize,
    /// Every nonzero lattice vector of length at most the target, up to sign.
    pub short_vectors: Vec<Vec<i64>>,
    /// The perturbed character on each of them; all nonzero.
    pub values: Vec<String>,
    /// Hermite normal form of the kernel sublattice.
    pub kernel: Vec<Vec<i64>>,
    pub kernel_systole: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Perturbation {
    #[serde(serialize_with = "ser_rational")]
    pub target: BigRational,
    #[serde(serialize_with = "ser_rationals")]
    pub lambda: Vec<BigRational>,
    #[serde(skip)]
    pub character: Character,
    pub certificates: Vec<CuspCertificate>,
    pub candidates_tried: u64,
    /// What the certificate does not show.
    pub assumption: &'static str,
}

fn ser_rationals<S: serde::Serializer>(x: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|v| v.to_string()))
}

const ASSUMPTION: &str = "the perturbed character is assumed to keep the finiteness type of the base character";

/// The coefficient grid, ordered by height `max(|p|, q)`, then by absolute
/// value, positive before negative. Zero comes first.
fn coefficient_grid(max_num: i64, max_den: i64) -> Vec<(i64, i64)> {
    let mut grid = vec![(0, 1)];
    for q in 1..=max_den {
        for p in -max_num..=max_num {
            if p != 0 && p.gcd(&q) == 1 {
                grid.push((p, q));
            }
        }
    }
    grid.sort_by(|&(p1, q1), &(p2, q2)| {
        let h = |p: i64, q: i64| if p == 0 { 0 } else { p.abs().max(q) };
        h(p1, q1)
            .cmp(&h(p2, q2))
            .then_with(|| (p1.abs() * q2).cmp(&(p2.abs() * q1)))
            .then_with(|| p2.signum().cmp(&p1.signum()))
    });
    grid
}

/// Integer data for one short vector: base value and auxiliary values, all
/// over a common denominator.
struct Row {
    base: i128,
    aux: Vec<i128>,
}

fn common_rows(base: &[BigRational], aux: &[Vec<BigRational>]) -> Result<Row> {
    let den = aux
        .iter()
        .flatten()
        .chain(base)
        .fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let conv = |v: &BigRational| {
        (v.numer() * (&den / v.denom()))
            .to_i128()
            .ok_or_else(|| Error::Input("character value too large".into()))
    };
    Ok(Row {
        base: conv(&base[0])?,
        aux: aux.iter().map(|a| conv(&a[0])).collect::<Result<_>>()?,
    })
}

fn nonzero_at(row: &Row, lambda: &[(i64, i64)]) -> bool {
    // value * lcm(q) = base * L + sum p_t * aux_t * L / q_t
    let l = lambda.iter().fold(1i128, |l, &(_, q)| l.lcm(&(q as i128)));
    let exact = || -> Option<i128> {
        let mut s = row.base.checked_mul(l)?;
        for (a, &(p, q)) in row.aux.iter().zip(lambda) {
            s = s.checked_add(a.checked_mul(p as i128)?.checked_mul(l / q as i128)?)?;
        }
        Some(s)
    };
    match exact() {
        Some(s) => s != 0,
        None => {
            let mut s = BigInt::from(row.base) * BigInt::from(l);
            for (a, &(p, q)) in row.aux.iter().zip(lambda) {
                s += BigInt::from(*a) * BigInt::from(p) * BigInt::from(l / q as i128);
            }
            !s.is_zero()
        }
    }
}

/// Searches for `mu = base + sum lambda_t aux_t` that is nonzero on every
/// nonzero cusp vector of length at most `target`, trying coefficient
/// vectors shell by shell in the grid order and taking the first hit.
pub fn perturb(
    base: &Character,
    target: &BigRational,
    grams: &[Gram],
    aux: &[Character],
    opts: &PerturbOptions,
) -> Result<Perturbation> {
    if grams.len() != base.num_cusps() || grams.iter().zip(&base.values).any(|(g, v)| g.rank() != v.len()) {
        return Err(Error::Shape("Gram matrices do not match the character".into()));
    }
    if let Some(bad) = aux.iter().position(|a| !a.same_shape(base)) {
        return Err(Error::Shape(format!(
            "auxiliary character {bad} does not match the base"
        )));
    }
    let radius2 = target * target;
    let shorts: Vec<Vec<(Vec<i64>, BigRational)>> = grams.iter().map(|g| short_vectors(g, &radius2)).collect();
    let mut rows = Vec::new();
    for (s, vecs) in shorts.iter().enumerate() {
        for (x, _) in vecs {
            let b = [base.value(s, x)];
            let a: Vec<Vec<BigRational>> = aux.iter().map(|c| vec![c.value(s, x)]).collect();
            let row = common_rows(&b, &a)?;
            if row.base == 0 && row.aux.iter().all(|&v| v == 0) {
                // every candidate vanishes here
                return Err(Error::NoSolutionWithinBound(0));
            }
            rows.push(row);
        }
    }
    let grid = coefficient_grid(opts.max_numerator, opts.max_denominator);
    let t = aux.len();
    let works = |idx: &[usize]| {
        let lambda: Vec<(i64, i64)> = idx.iter().map(|&i| grid[i]).collect();
        rows.iter().all(|r| nonzero_at(r, &lambda))
    };
    let mut tried = 0u64;
    let mut found = None;
    'shells: for k in 0..grid.len() {
        if t == 0 && k > 0 {
            break;
        }
        let mut chunk: Vec<Vec<usize>> = Vec::with_capacity(4096);
        let mut idx = vec![0usize; t];
        loop {
            if t == 0 || idx.contains(&k) {
                chunk.push(idx.clone());
            }
            let done = !advance(&mut idx, k);
            if chunk.len() == 4096 || done {
                let n = chunk.len() as u64;
                if tried + n > opts.max_candidates {
                    chunk.truncate((opts.max_candidates - tried) as usize);
                }
                if let Some(hit) = chunk.par_iter().position_first(|c| works(c)) {
                    tried += hit as u64 + 1;
                    found = Some(chunk.swap_remove(hit));
                    break 'shells;
                }
                tried += chunk.len() as u64;
                if tried >= opts.max_candidates {
                    break 'shells;
                }
                chunk.clear();
            }
            if done {
                break;
            }
        }
    }
    let idx = found.ok_or(Error::NoSolutionWithinBound(tried))?;
    let lambda: Vec<BigRational> = idx
        .iter()
        .map(|&i| BigRational::new(BigInt::from(grid[i].0), BigInt::from(grid[i].1)))
        .collect();
    let mut character = base.clone();
    for (l, a) in lambda.iter().zip(aux) {
        character = character.axpy(l, a);
    }
    let certificates = certify(&character, grams, &shorts)?;
    Ok(Perturbation {
        target: target.clone(),
        lambda,
        character,
        certificates,
        candidates_tried: tried,
        assumption: ASSUMPTION,
    })
}

/// Next index vector in lexicographic order with entries `<= k`.
fn advance(idx: &mut [usize], k: usize) -> bool {
    for i in (0..idx.len()).rev() {
        if idx[i] < k {
            idx[i] += 1;
            return true;
        }
        idx[i] = 0;
    }
    false
}

fn certify(
    character: &Character,
    grams: &[Gram],
    shorts: &[Vec<(Vec<i64>, BigRational)>],
) -> Result<Vec<CuspCertificate>> {
    grams
        .iter()
        .enumerate()
        .map(|(s, g)| {
            let values: Vec<String> = shorts[s]
                .iter()
                .map(|(x, _)| character.value(s, x).to_string())
                .collect();
            let ints = integral_direction(&character.values[s])?;
            let kernel = kernel_sublattice(&ints)?;
            let kernel_systole = systole(g, &kernel.basis)?.map(|s| s.length);
            Ok(CuspCertificate {
                cusp: s,
                short_vectors: shorts[s].iter().map(|(x, _)| x.clone()).collect(),
                values,
                kernel: hermite_normal_form(&kernel.basis)?,
                kernel_systole,
            })
        })
        .collect()
}

/// Re-enumerates the short vectors of every cusp and checks that the
/// certificate lists exactly those, with correct nonzero values.
pub fn verify_certificate(p: &Perturbation, grams: &[Gram]) -> bool {
    let radius2 = &p.target * &p.target;
    p.certificates.len() == grams.len()
        && p.certificates.iter().zip(grams).all(|(cert, g)| {
            let shorts: Vec<Vec<i64>> = short_vectors(g, &radius2).into_iter().map(|(x, _)| x).collect();
            shorts == cert.short_vectors
                && cert.values.len() == shorts.len()
                && shorts.iter().zip(&cert.values).all(|(x, v)| {
                    let val = p.character.value(cert.cusp, x);
                    !val.is_zero() && val.to_string() == *v
                })
                && cert
                    .kernel_systole
                    .is_none_or(|l| l * l > radius2.to_f64().unwrap_or(f64::INFINITY) * (1.0 - 1e-12))
        })
}
