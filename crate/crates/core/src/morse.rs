//! Ascending and descending links of the diagonal Morse function.
//!
//! Every vertex of the cube complex has the same link: the nerve of the
//! polytope, whose vertices are facets and whose simplices are facet sets
//! spanning a face. The ascending link at `v` is the full subcomplex on the
//! facets with status `O` at `v`; the descending link uses status `I`.
//! Links depend only on that vertex set, so the batch check runs once per
//! distinct set.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{classify_all, status_at, Moves, State, Status};
use crate::homology::{certify_simply_connected, sparse, Certificate, SimplicialComplex, DEFAULT_TIETZE_BUDGET};
use crate::polytope::{Colouring, Polytope};
use crate::unionfind::UnionFind;

/// Upper bound on the number of distinct status patterns in a batch.
pub const MAX_PATTERNS: u64 = 1 << 24;

/// The common link of all cube-complex vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexLink {
    complex: SimplicialComplex,
    num_facets: usize,
}

impl VertexLink {
    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn num_facets(&self) -> usize {
        self.num_facets
    }

    /// Full subcomplex on the given facets.
    pub fn restrict(&self, facets: &[u32]) -> SimplicialComplex {
        self.complex.full_subcomplex(facets)
    }
}

/// The complete nerve.
pub fn nerve(polytope: &Polytope) -> VertexLink {
    nerve_up_to(polytope, polytope.dim().saturating_sub(1))
}

/// The nerve with simplices of dimension at most `max_dim`.
pub fn nerve_up_to(polytope: &Polytope, max_dim: usize) -> VertexLink {
    let sets = polytope.spanning_sets(max_dim + 1);
    let deeper = max_dim + 1 < polytope.dim()
        && (!polytope.finite_vertices().is_empty()
            || polytope.ideal_vertices().iter().any(|v| v.pairs.len() > max_dim + 1));
    let levels = sets.into_iter().map(|level| level.concat()).collect();
    VertexLink {
        complex: SimplicialComplex::from_levels(levels, deeper.then_some(max_dim)),
        num_facets: polytope.num_facets(),
    }
}

/// Facets with the given status at `v`, ascending.
pub fn status_set(colouring: &Colouring, state: &State, moves: &Moves, v: u64, status: Status) -> Vec<u32> {
    (0..colouring.colours().len() as u32)
        .filter(|&f| status_at(colouring, state, moves, v, f) == status)
        .collect()
}

pub fn ascending_link(
    link: &VertexLink,
    colouring: &Colouring,
    state: &State,
    moves: &Moves,
    v: u64,
) -> SimplicialComplex {
    link.restrict(&status_set(colouring, state, moves, v, Status::O))
}

pub fn descending_link(
    link: &VertexLink,
    colouring: &Colouring,
    state: &State,
    moves: &Moves,
    v: u64,
) -> SimplicialComplex {
    link.restrict(&status_set(colouring, state, moves, v, Status::I))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Ascending,
    Descending,
}

/// Outcome of one test on one link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Pass,
    Fail,
    Unknown,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkResult {
    /// A cube-complex vertex where this link occurs.
    pub vertex: u64,
    pub side: Side,
    pub num_vertices: usize,
    pub num_simplices: Vec<usize>,
    pub connected: Check,
    /// Reduced Betti numbers `b~_0..=b~_{k-1}` over Q and Z/2.
    pub reduced_betti_q: Vec<usize>,
    pub reduced_betti_z2: Vec<usize>,
    /// Torsion coefficients of `H_0..=H_{k-1}` over Z.
    pub torsion: Vec<Vec<String>>,
    pub simply_connected: Check,
    /// Largest `j <= k` such that the link is `(j-1)`-connected as far as
    /// the checks can tell, counting only certified facts.
    pub certified_degree: usize,
}

impl LinkResult {
    pub fn has_unknown(&self) -> bool {
        self.simply_connected == Check::Unknown
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    pub k: usize,
    /// Links actually checked.
    pub num_patterns: usize,
    /// Orbits of move-parity vectors under the supplied symmetries, when
    /// the check was reduced by symmetry.
    pub symmetry_orbits: Option<usize>,
    pub links: Vec<LinkResult>,
    /// Indices into `links` of links below degree `k`.
    pub failures: Vec<usize>,
    /// Indices of links whose simple connectivity could not be decided.
    pub unknowns: Vec<usize>,
    /// Largest `j <= k` such that every link passes through degree `j`.
    pub certified_degree: usize,
}

impl LinkReport {
    /// The kernel is certified to be of type `F_k`.
    pub fn verdict(&self) -> bool {
        self.certified_degree >= self.k
    }
}

#[derive(Clone, Debug)]
pub struct LinkOptions {
    pub k: usize,
    /// Worker threads; `0` uses the global pool.
    pub jobs: usize,
    pub tietze_budget: usize,
    /// Facet permutations to reduce by; each is verified before use.
    pub symmetries: Vec<Vec<u32>>,
}

impl LinkOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            jobs: 0,
            tietze_budget: DEFAULT_TIETZE_BUDGET,
            symmetries: Vec::new(),
        }
    }
}

/// Runs the finiteness check with the given degree and worker count.
pub fn check_all_links(
    polytope: &Polytope,
    colouring: &Colouring,
    state: &State,
    moves: &Moves,
    k: usize,
    jobs: usize,
) -> Result<LinkReport> {
    let opts = LinkOptions {
        jobs,
        ..LinkOptions::new(k)
    };
    check_links_with(polytope, colouring, state, moves, &opts)
}

/// Distinct vertex sets of ascending and descending links, with a vertex
/// and side where each occurs, sorted by size and then lexicographically.
pub fn link_patterns(colouring: &Colouring, state: &State, moves: &Moves) -> Result<Vec<(Vec<u32>, u64, Side)>> {
    let blocks = moves.blocks();
    if blocks.len() as u64 >= 64 || 1u64 << blocks.len() > MAX_PATTERNS {
        return Err(Error::Input(format!(
            "{} moves give too many status patterns",
            blocks.len()
        )));
    }
    // statuses only depend on the parity of v over each move
    let reps: Vec<u64> = blocks.iter().map(|b| 1u64 << (b[0] - 1)).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for parity in 0u64..1 << blocks.len() {
        let v = (0..blocks.len())
            .filter(|&i| parity >> i & 1 == 1)
            .fold(0u64, |acc, i| acc | reps[i]);
        for (side, status) in [(Side::Ascending, Status::O), (Side::Descending, Status::I)] {
            let set = status_set(colouring, state, moves, v, status);
            if seen.insert(set.clone()) {
                out.push((set, v, side));
            }
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// Action of a state symmetry on move-parity vectors: bit `b` of the input
/// goes to bit `blocks[b]`, then `twist` is added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAction {
    pub blocks: Vec<usize>,
    pub twist: u64,
}

impl ParityAction {
    pub fn apply(&self, parity: u64) -> u64 {
        (0..self.blocks.len())
            .filter(|&b| parity >> b & 1 == 1)
            .fold(self.twist, |acc, b| acc ^ 1 << self.blocks[b])
    }
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

fn ideal_key(pairs: impl Iterator<Item = [u32; 2]>) -> Vec<[u32; 2]> {
    let mut key: Vec<[u32; 2]> = pairs.map(|[a, b]| [a.min(b), a.max(b)]).collect();
    key.sort_unstable();
    key
}

/// Checks that `perm` is a combinatorial symmetry of the polytope that
/// permutes colour classes and moves and carries the state to itself up to
/// flipping whole moves. Such a symmetry maps the ascending link at parity
/// `p` isomorphically onto the ascending link at `action.apply(p)`.
pub fn verify_symmetry(
    polytope: &Polytope,
    colouring: &Colouring,
    state: &State,
    moves: &Moves,
    perm: &[u32],
) -> Result<ParityAction> {
    let n = polytope.num_facets();
    let bad = |why: &str| Err(Error::Input(format!("not a symmetry: {why}")));
    if perm.len() != n || sorted(perm.to_vec()) != (0..n as u32).collect::<Vec<_>>() {
        return bad("not a permutation of the facets");
    }
    let img = |f: u32| perm[f as usize];
    if polytope
        .adjacent_pairs()
        .any(|(a, b)| !polytope.is_adjacent(img(a), img(b)))
    {
        return bad("adjacency is not preserved");
    }
    let finite: HashSet<&[u32]> = polytope.finite_vertices().iter().map(Vec::as_slice).collect();
    if polytope
        .finite_vertices()
        .iter()
        .any(|v| !finite.contains(sorted(v.iter().map(|&f| img(f)).collect()).as_slice()))
    {
        return bad("finite vertices are not preserved");
    }
    let ideal: HashSet<Vec<[u32; 2]>> = polytope
        .ideal_vertices()
        .iter()
        .map(|v| ideal_key(v.pairs.iter().copied()))
        .collect();
    if polytope
        .ideal_vertices()
        .iter()
        .any(|v| !ideal.contains(&ideal_key(v.pairs.iter().map(|&[a, b]| [img(a), img(b)]))))
    {
        return bad("ideal vertices are not preserved");
    }
    let blocks = moves.blocks();
    let block_of: Vec<usize> = (1..=colouring.palette() as u32)
        .map(|c| blocks.iter().position(|b| b.contains(&c)).unwrap_or(usize::MAX))
        .collect();
    let block = |f: u32| block_of[colouring.colour(f) as usize - 1];
    let mut map = vec![usize::MAX; blocks.len()];
    let mut twist: Vec<Option<bool>> = vec![None; blocks.len()];
    for f in 0..n as u32 {
        let (b, b2) = (block(f), block(img(f)));
        if map[b] == usize::MAX {
            map[b] = b2;
        } else if map[b] != b2 {
            return bad("moves are not permuted");
        }
        let flip = state.status(f) != state.status(img(f));
        match twist[b2] {
            None => twist[b2] = Some(flip),
            Some(t) if t != flip => return bad("the state is not preserved up to whole moves"),
            Some(_) => {}
        }
    }
    if sorted(map.iter().map(|&b| b as u32).collect()) != (0..blocks.len() as u32).collect::<Vec<_>>() {
        return bad("moves are not permuted");
    }
    let twist = (0..blocks.len())
        .filter(|&b| twist[b] == Some(true))
        .fold(0u64, |acc, b| acc | 1 << b);
    Ok(ParityAction { blocks: map, twist })
}

fn parity_vertex(moves: &Moves, parity: u64) -> u64 {
    moves
        .blocks()
        .iter()
        .enumerate()
        .filter(|&(i, _)| parity >> i & 1 == 1)
        .fold(0u64, |acc, (_, b)| acc | 1u64 << (b[0] - 1))
}

/// One ascending link per orbit of move-parity vectors under the given
/// symmetries. Descending links are ascending links at the complementary
/// parity, so these cover every link. Returns the patterns and the number
/// of orbits.
pub fn link_orbit_representatives(
    polytope: &Polytope,
    colouring: &Colouring,
    state: &State,
    moves: &Moves,
    symmetries: &[Vec<u32>],
) -> Result<Vec<(Vec<u32>, u64, Side)>> {
    let nb = moves.blocks().len();
    if nb as u64 >= 64 || 1u64 << nb > MAX_PATTERNS {
        return Err(Error::Input(format!("{nb} moves give too many status patterns")));
    }
    let actions = symmetries
        .iter()
        .map(|p| verify_symmetry(polytope, colouring, state, moves, p))
        .collect::<Result<Vec<_>>>()?;
    let mut orbits = UnionFind::new(1 << nb);
    for parity in 0u64..1 << nb {
        for a in &actions {
            orbits.union(parity as usize, a.apply(parity) as usize);
        }
    }
    let mut out = Vec::new();
    for parity in 0u64..1 << nb {
        if orbits.find(parity as usize) == parity as usize {
            let v = parity_vertex(moves, parity);
            out.push((status_set(colouring, state, moves, v, Status::O), v, Side::Ascending));
        }
    }
    Ok(out)
}

pub fn check_links_with(
    polytope: &Polytope,
    colouring: &Colouring,
    state: &State,
    moves: &Moves,
    opts: &LinkOptions,
) -> Result<LinkReport> {
    let game = classify_all(polytope, colouring, state, moves);
    if !game.coherent {
        return Err(Error::NonCoherent(game.good + game.bad));
    }
    let k = opts.k;
    let (patterns, symmetry_orbits) = if opts.symmetries.is_empty() {
        (link_patterns(colouring, state, moves)?, None)
    } else {
        let reps = link_orbit_representatives(polytope, colouring, state, moves, &opts.symmetries)?;
        let n = reps.len();
        (reps, Some(n))
    };
    let link = nerve_up_to(polytope, k.max(1));
    let run = || -> Vec<LinkResult> {
        patterns
            .par_iter()
            .map(|(set, v, side)| check_link(&link, set, *v, *side, k, opts.tietze_budget))
            .collect()
    };
    let links = if opts.jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?
            .install(run)
    };
    let failures = (0..links.len()).filter(|&i| links[i].certified_degree < k).collect();
    let unknowns = (0..links.len()).filter(|&i| links[i].has_unknown()).collect();
    let certified_degree = links.iter().map(|l| l.certified_degree).min().unwrap_or(k);
    Ok(LinkReport {
        k,
        num_patterns: patterns.len(),
        symmetry_orbits,
        links,
        failures,
        unknowns,
        certified_degree,
    })
}

/// Checks the full subcomplex of `link` on `set` through degree `k`.
pub fn check_link(link: &VertexLink, set: &[u32], vertex: u64, side: Side, k: usize, budget: usize) -> LinkResult {
    let complex = link.restrict(set);
    let num_simplices = (0..=complex.dim().unwrap_or(0)).map(|d| complex.count(d)).collect();
    let mut result = LinkResult {
        vertex,
        side,
        num_vertices: complex.count(0),
        num_simplices,
        connected: Check::Skipped,
        reduced_betti_q: Vec::new(),
        reduced_betti_z2: Vec::new(),
        torsion: Vec::new(),
        simply_connected: Check::Skipped,
        certified_degree: 0,
    };
    if k == 0 {
        return result;
    }
    if complex.is_empty() {
        result.connected = Check::Fail;
        return result;
    }
    let connected = complex.num_components() == 1;
    result.connected = if connected { Check::Pass } else { Check::Fail };

    // homology of the truncated link, H_0..=H_{k-1}
    let chain = complex.chain_complex();
    let top = k - 1;
    let mut ranks_z = vec![0usize; top + 2];
    let mut ranks_2 = vec![0usize; top + 2];
    let mut torsion = vec![Vec::new(); top + 2];
    for d in 1..=top + 1 {
        let b = chain.boundary(d);
        if b.is_empty() {
            continue;
        }
        let rows = chain.dims()[d - 1];
        let form = sparse::smith_form(rows, b);
        ranks_z[d] = form.rank;
        torsion[d] = form.torsion.iter().map(|t| t.to_string()).collect();
        ranks_2[d] = sparse::rank_gf2(rows, b);
    }
    let dim_at = |d: usize| chain.dims().get(d).copied().unwrap_or(0);
    let reduce = |d: usize, b: usize| if d == 0 { b - 1 } else { b };
    result.reduced_betti_q = (0..=top)
        .map(|d| reduce(d, dim_at(d) - ranks_z[d] - ranks_z[d + 1]))
        .collect();
    result.reduced_betti_z2 = (0..=top)
        .map(|d| reduce(d, dim_at(d) - ranks_2[d] - ranks_2[d + 1]))
        .collect();
    result.torsion = (0..=top).map(|d| std::mem::take(&mut torsion[d + 1])).collect();
    let acyclic_at =
        |d: usize| result.reduced_betti_q[d] == 0 && result.reduced_betti_z2[d] == 0 && result.torsion[d].is_empty();

    if !connected {
        return result;
    }
    result.certified_degree = 1;
    if k >= 2 {
        result.simply_connected = if !acyclic_at(1) {
            Check::Fail
        } else {
            match certify_simply_connected(&complex, budget) {
                Ok(Certificate::Certified) => Check::Pass,
                _ => Check::Unknown,
            }
        };
        if result.simply_connected != Check::Pass {
            return result;
        }
        result.certified_degree = 2;
        // simply connected and acyclic through degree j-1 gives (j-1)-connected
        for j in 3..=k {
            if !acyclic_at(j - 1) {
                break;
            }
            result.certified_degree = j;
        }
    }
    result
}
