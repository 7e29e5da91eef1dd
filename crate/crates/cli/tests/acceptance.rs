//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Set `CUBIST_FULL_LINKS=1` to also check every P8 link pattern without
//! symmetry reduction (about an hour on one core).

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cubist::characters::{
    choi_park_b1, cusp_loops, evaluate, iota_star_matrix, perturb, surjectivity_conditions, systole, Character, Gram,
    PairCondition, PerturbOptions, Surjectivity, TabulatedCochain, UnitCocycle,
};
use cubist::cubulation::{CubeComplex, CyclicCover, DEFAULT_CELL_CAP};
use cubist::formats::{read_json, ColouringFile, StateFile, SymmetriesFile};
use cubist::game::{classify_all, status_at, Moves, State, Status};
use cubist::gosset::{frame_colouring, gosset_p8_with_roots};
use cubist::homology::{betti, integral_homology, Field, SimplicialComplex};
use cubist::morse::{check_links_with, Check, LinkOptions};
use cubist::polytope::{cusp_count, link_colouring, Colouring, Polytope};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("{what} took {t:.1?}, limit {limit:?}"))
}

struct P8 {
    polytope: Polytope,
    colouring: Colouring,
}

fn load_p8() -> P8 {
    let (polytope, _) = gosset_p8_with_roots();
    let colouring: Colouring = read_json::<ColouringFile>(data("p8_colouring.json"))
        .expect("shipped colouring")
        .into();
    P8 { polytope, colouring }
}

fn polygon(n: usize) -> (Polytope, Colouring) {
    let p = Polytope::ideal_polygon(n);
    let c = Colouring::new(2, (0..2 * n).map(|i| 1 + (i % 2) as u32).collect());
    (p, c)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let out_path = dir.path().join("p8.json");
    let out = Command::new(env!("CARGO_BIN_EXE_cubist"))
        .args(["gen-p8", "--output", out_path.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let census = (
        r["facets"].as_u64(),
        r["ideal_vertices"].as_u64(),
        r["finite_vertices"].as_u64(),
    );
    ensure(census == (Some(240), Some(2160), Some(17280)), || {
        format!("census {census:?}")
    })?;
    within(start, Duration::from_secs(60), "gen-p8")?;
    Ok(format!(
        "240 facets, 2160 ideal vertices, 17280 finite vertices in {:.1?}",
        start.elapsed()
    ))
}

fn criterion_2(p8: &P8) -> Outcome {
    let start = Instant::now();
    let (p, c) = (&p8.polytope, &p8.colouring);
    let (_, roots) = gosset_p8_with_roots();
    ensure(frame_colouring(&roots) == *c, || {
        "shipped colouring differs from the frame colouring".into()
    })?;
    ensure(c.validate(p).is_valid(), || "shipped colouring is not proper".into())?;
    for class in c.classes() {
        ensure(class.len() == 16, || {
            format!("a colour class has {} facets", class.len())
        })?;
        for (i, &a) in class.iter().enumerate() {
            if let Some(&b) = class[i + 1..].iter().find(|&&b| p.is_adjacent(a, b)) {
                return Err(format!("facets {a} and {b} share a colour and are adjacent"));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for v in 0..p.ideal_vertices().len() {
        seen.insert(link_colouring(p, c, v).map_err(|e| e.to_string())?.1);
    }
    ensure(seen == BTreeSet::from([7, 14]), || {
        format!("link colour counts {seen:?}")
    })?;
    let count = cusp_count(p, c);
    ensure(count.total == 65280, || format!("{} cusps", count.total))?;
    within(start, Duration::from_secs(60), "colouring statistics")?;
    Ok(format!(
        "15 classes of 16 independent facets; c' in {{7, 14}}; {} cusps (7: {:?}, 14: {:?})",
        count.total, count.by_link_colours[&7], count.by_link_colours[&14]
    ))
}

fn criterion_3(p8: &P8) -> Outcome {
    let start = Instant::now();
    let b1 = choi_park_b1(&p8.polytope, &p8.colouring).map_err(|e| e.to_string())?;
    ensure(b1 == 365, || format!("b1 = {b1}"))?;
    within(start, Duration::from_secs(600), "b1")?;
    Ok(format!("b1 = 365 in {:.1?}", start.elapsed()))
}

fn criterion_4(p8: &P8) -> Outcome {
    let start = Instant::now();
    let (p, c) = (&p8.polytope, &p8.colouring);
    let state: State = read_json::<StateFile>(data("p8_state.json"))
        .map_err(|e| e.to_string())?
        .into();
    let moves = Moves::discrete(c.palette());
    ensure(state.is_balanced(c), || "state is not balanced".into())?;
    let game = classify_all(p, c, &state, &moves);
    ensure(game.coherent, || {
        format!("{} good and {} bad pairs", game.good, game.bad)
    })?;
    let full = std::env::var("CUBIST_FULL_LINKS").is_ok_and(|v| v == "1");
    let symmetries = if full {
        Vec::new()
    } else {
        read_json::<SymmetriesFile>(data("p8_symmetries.json"))
            .map_err(|e| e.to_string())?
            .symmetries
    };
    let opts = LinkOptions {
        symmetries,
        ..LinkOptions::new(3)
    };
    let r = check_links_with(p, c, &state, &moves, &opts).map_err(|e| e.to_string())?;
    ensure(r.unknowns.is_empty(), || {
        format!("{} links with unknown certificates", r.unknowns.len())
    })?;
    ensure(r.failures.is_empty(), || format!("{} links fail", r.failures.len()))?;
    for l in &r.links {
        ensure(l.connected == Check::Pass && l.simply_connected == Check::Pass, || {
            format!("link at vertex {} is not certified simply connected", l.vertex)
        })?;
        let vanishing =
            l.reduced_betti_q.iter().chain(&l.reduced_betti_z2).all(|&b| b == 0) && l.torsion.iter().all(Vec::is_empty);
        ensure(vanishing, || format!("link at vertex {} has homology", l.vertex))?;
    }
    ensure(r.verdict(), || {
        format!("certified only to degree {}", r.certified_degree)
    })?;
    let scope = match r.symmetry_orbits {
        Some(n) => format!("{n} orbit representatives under verified symmetries"),
        None => format!("all {} link patterns", r.num_patterns),
    };
    Ok(format!(
        "searched balanced state, coherent; {scope}: connected, simply connected, reduced H1 = H2 = 0; verdict F3 in {:.1?}",
        start.elapsed()
    ))
}

fn criterion_5(p8: &P8) -> Outcome {
    let start = Instant::now();
    let (p, c) = (&p8.polytope, &p8.colouring);
    let mut values = [0usize; 2];
    for v in 0..p.ideal_vertices().len() {
        let report = surjectivity_conditions(p, c, v).map_err(|e| e.to_string())?;
        ensure(report.verdict == Surjectivity::Surjective, || {
            format!("vertex {v}: {:?}", report.verdict)
        })?;
        let (_, colours) = link_colouring(p, c, v).map_err(|e| e.to_string())?;
        let (want, magnitude) = if colours == 7 {
            (PairCondition::Cond1, 2)
        } else {
            (PairCondition::Cond2, 4)
        };
        ensure(report.conditions.iter().all(|&x| x == want), || {
            format!(
                "vertex {v} with {colours} link colours has conditions {:?}",
                report.conditions
            )
        })?;
        for (j, row) in iota_star_matrix(p, c, v, 0)
            .map_err(|e| e.to_string())?
            .iter()
            .enumerate()
        {
            let row = row
                .as_ref()
                .ok_or_else(|| format!("vertex {v}: no cocycle for pair {j}"))?;
            ensure(row[j].abs() == magnitude, || {
                format!("vertex {v} pair {j}: value {}", row[j])
            })?;
            ensure(row.iter().enumerate().all(|(i, &x)| i == j || x == 0), || {
                format!("vertex {v} pair {j}: off-diagonal values {row:?}")
            })?;
            values[(magnitude / 2 - 1) as usize] += 1;
        }
    }
    within(start, Duration::from_secs(600), "cusp surjectivity")?;
    Ok(format!(
        "2160 vertices Surjective (Cond1 at c' = 7, Cond2 at c' = 14); {} loops hit +-2 and {} hit +-4, off-diagonal 0",
        values[0], values[1]
    ))
}

fn criterion_6() -> Outcome {
    for n in 2..=6usize {
        let (p, c) = polygon(n);
        let cx = CubeComplex::build(&p, &c, 2, DEFAULT_CELL_CAP).map_err(|e| e.to_string())?;
        let counts = cx.cell_counts().counts;
        let expected = vec![4u128, 4 * n as u128, 2 * n as u128 - 1];
        ensure(counts == expected, || format!("n = {n}: cells {counts:?}"))?;
        let chi = cx.euler_characteristic().map_err(|e| e.to_string())?;
        ensure(chi == 3 - 2 * n as i64, || format!("n = {n}: chi = {chi}"))?;
        let b1 = cx.chain_complex().betti(Field::Q, 1).map_err(|e| e.to_string())?[1];
        let cp = choi_park_b1(&p, &c).map_err(|e| e.to_string())? as usize;
        ensure(b1 == 2 * n - 2 && cp == b1, || {
            format!("n = {n}: cellular b1 {b1}, colour formula {cp}")
        })?;
        ensure(cusp_count(&p, &c).total == 1, || format!("n = {n}: more than one cusp"))?;
        let report = surjectivity_conditions(&p, &c, 0).map_err(|e| e.to_string())?;
        ensure(report.verdict == Surjectivity::Inconclusive, || {
            format!("n = {n}: {:?}", report.verdict)
        })?;
        let rows = iota_star_matrix(&p, &c, 0, 0).map_err(|e| e.to_string())?;
        ensure(rows.iter().all(Option::is_none), || {
            format!("n = {n}: a cocycle was constructed")
        })?;
        // every state gives a cocycle (discrete moves), and each one vanishes on the cusp loop
        let torus = cusp_loops(&p, &c, 0, 0).map_err(|e| e.to_string())?;
        let moves = Moves::discrete(2);
        for bits in 0u32..1 << (2 * n) {
            let state = State::new(
                (0..2 * n)
                    .map(|i| if bits >> i & 1 == 1 { Status::O } else { Status::I })
                    .collect(),
            );
            let z = UnitCocycle::new(&p, &c, &state, &moves).map_err(|e| e.to_string())?;
            let value = evaluate(&z, &torus.loops[0]);
            ensure(value == 0, || {
                format!("n = {n}, state {bits:b}: value {value} on the cusp loop")
            })?;
        }
    }
    Ok("2n-gons, n = 2..6: cells (4, 4n, 2n-1), chi = 3-2n, b1 = 2n-2 both ways, one cusp, Inconclusive, cusp loop value 0 for every state".into())
}

/// Unit cocycle of a state in which two facets of colour 1 disagree.
fn polygon_cocycle(n: usize) -> Result<(Polytope, Colouring, CubeComplex, Vec<i64>), String> {
    let (p, c) = polygon(n);
    let mut state = State::uniform(2 * n, Status::I);
    state.set(0, Status::O);
    let mut cx = CubeComplex::build(&p, &c, 2, DEFAULT_CELL_CAP).map_err(|e| e.to_string())?;
    let z = cx
        .unit_cocycle(&p, &c, &state, &Moves::discrete(2))
        .map_err(|e| e.to_string())?;
    Ok((p, c, cx, z))
}

fn criterion_7() -> Outcome {
    for n in 2..=6usize {
        let (_, _, cx, z) = polygon_cocycle(n)?;
        let slope = 2 * n - 3;
        for ell in 1..=64u64 {
            let cover = CyclicCover::new(&cx, &z, ell).map_err(|e| e.to_string())?;
            let chi = cover.euler_characteristic().map_err(|e| e.to_string())?;
            ensure(chi == ell as i64 * (3 - 2 * n as i64), || {
                format!("n = {n}, ell = {ell}: chi = {chi}")
            })?;
            let b = cover.chain_complex().betti(Field::Q, 2).map_err(|e| e.to_string())?;
            let b0 = ell.gcd(&2) as usize;
            ensure(b[0] == b0 && b[2] == 0, || format!("n = {n}, ell = {ell}: betti {b:?}"))?;
            ensure(b[1] == ell as usize * slope + b0, || {
                format!("n = {n}, ell = {ell}: b1 = {}", b[1])
            })?;
            ensure(b[0] as i64 - b[1] as i64 + b[2] as i64 == chi, || {
                format!("n = {n}, ell = {ell}: Euler identity")
            })?;
        }
    }
    Ok("n = 2..6, ell = 1..64: chi = ell(3-2n), b2 = 0, b1 = ell(2n-3) + b0 with b0 = gcd(ell, 2) (intercept 1 for odd ell, 2 for even ell)".into())
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for n in 2..=6usize {
        let (p, c, cx, z) = polygon_cocycle(n)?;
        let torus = cusp_loops(&p, &c, 0, 0).map_err(|e| e.to_string())?;
        let loop_value = evaluate(
            &TabulatedCochain::new(&cx, &z).map_err(|e| e.to_string())?,
            &torus.loops[0],
        );
        for ell in 1..=8u64 {
            let b = CyclicCover::new(&cx, &z, ell)
                .map_err(|e| e.to_string())?
                .chain_complex()
                .betti(Field::Q, 2)
                .map_err(|e| e.to_string())?;
            // the boundary circle lifts to gcd(ell, value) circles
            let circles = ell.gcd(&(loop_value.unsigned_abs())) as usize;
            let boundary = [circles, circles];
            for i in 0..=2usize {
                let lhs = b[2 - i];
                let rhs = if i == 0 { 0 } else { boundary[i - 1] } + b[i];
                ensure(lhs <= rhs, || format!("n = {n}, ell = {ell}, i = {i}: {lhs} > {rhs}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "b_(2-i)(M) <= b_(i-1)(boundary) + b_i(M) holds in all {checked} cases (2n-gons and their covers)"
    ))
}

fn random_complex(rng: &mut impl Rng) -> Vec<Vec<u32>> {
    (0..rng.gen_range(1..9))
        .map(|_| {
            let size = rng.gen_range(1..=4);
            let mut s: Vec<u32> = (0..7).collect();
            s.shuffle(rng);
            s.truncate(size);
            s
        })
        .collect()
}

fn even_torsion(t: &[BigInt]) -> usize {
    t.iter().filter(|x| x.is_even()).count()
}

fn homology_suite(rng: &mut impl Rng, cases: usize) -> Result<(), String> {
    for case in 0..cases {
        let simplices = random_complex(rng);
        let cx = SimplicialComplex::from_simplices(&simplices);
        let q = common::dense_betti(&simplices, 3, false);
        let z2 = common::dense_betti(&simplices, 3, true);
        let ours_q = betti(&cx, Field::Q, 3).map_err(|e| e.to_string())?;
        let ours_z2 = betti(&cx, Field::Z2, 3).map_err(|e| e.to_string())?;
        ensure(ours_q == q && ours_z2 == z2, || {
            format!("complex {case} {simplices:?}: Betti numbers differ")
        })?;
        let h = integral_homology(&cx, 3).map_err(|e| e.to_string())?;
        for k in 0..=3 {
            let below = if k == 0 { 0 } else { even_torsion(&h[k - 1].torsion) };
            ensure(
                h[k].rank == q[k] && z2[k] == q[k] + even_torsion(&h[k].torsion) + below,
                || format!("complex {case} {simplices:?}: torsion in degree {k} disagrees with Z/2 ranks"),
            )?;
        }
    }
    Ok(())
}

fn status_suite(rng: &mut impl Rng, cases: usize) -> Result<(), String> {
    for case in 0..cases {
        let n = rng.gen_range(2..=6);
        let p = Polytope::ideal_polygon(n);
        let palette = rng.gen_range(1..=6usize);
        let colours = (0..p.num_facets()).map(|_| rng.gen_range(1..=palette as u32)).collect();
        let c = Colouring::new(palette, colours);
        let labels: Vec<usize> = (0..palette).map(|_| rng.gen_range(0..palette)).collect();
        let blocks = (0..palette)
            .filter(|l| labels.contains(l))
            .map(|l| (1..=palette as u32).filter(|&x| labels[x as usize - 1] == l).collect())
            .collect();
        let moves = Moves::new(palette, blocks).map_err(|e| e.to_string())?;
        let state = State::new(
            (0..p.num_facets())
                .map(|_| if rng.gen() { Status::O } else { Status::I })
                .collect(),
        );
        let path: Vec<u32> = (0..rng.gen_range(0..20))
            .map(|_| rng.gen_range(1..=palette as u32))
            .collect();
        for end in 0..=path.len() {
            let walked = common::walk_statuses(&c, &state, &moves, &path[..end]);
            let v = common::walk_vertex(&path[..end]);
            for (f, &s) in walked.iter().enumerate() {
                ensure(status_at(&c, &state, &moves, v, f as u32) == s, || {
                    format!("sample {case}: facet {f} after {:?}", &path[..end])
                })?;
            }
        }
    }
    Ok(())
}

fn random_gram(rng: &mut impl Rng, n: usize) -> Vec<Vec<i64>> {
    let a: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum::<i64>() + (i == j) as i64)
                .collect()
        })
        .collect()
}

fn to_gram(g: &[Vec<i64>]) -> Gram {
    Gram::new(
        g.iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect(),
    )
    .unwrap()
}

fn systole_suite(rng: &mut impl Rng, cases: usize) -> Result<(), String> {
    let mut done = 0;
    while done < cases {
        let n = rng.gen_range(1..=4);
        let g = random_gram(rng, n);
        let k = rng.gen_range(1..=n);
        let basis: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        if common::rank_q(&basis) < k {
            continue;
        }
        let s = systole(&to_gram(&g), &basis)
            .map_err(|e| e.to_string())?
            .ok_or("zero lattice")?;
        let expected = common::double_radius_minimum(&common::restrict_gram(&g, &basis));
        ensure(s.squared == BigRational::from_integer(expected.into()), || {
            format!("lattice {done}: systole^2 {} but oracle {expected}", s.squared)
        })?;
        done += 1;
    }
    Ok(())
}

fn perturb_suite(rng: &mut impl Rng, cases: usize) -> Result<(), String> {
    for case in 0..cases {
        let shape: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=2)).collect();
        let base: Vec<Vec<i64>> = shape
            .iter()
            .map(|&r| (0..r).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        let diag: Vec<Vec<i64>> = shape
            .iter()
            .map(|&r| (0..r).map(|_| rng.gen_range(1..=3)).collect())
            .collect();
        let target = rng.gen_range(1..=3i64);
        let grams: Vec<Gram> = diag.iter().map(|d| Gram::diagonal(d)).collect();
        let mut aux = Vec::new();
        for (s, &r) in shape.iter().enumerate() {
            for i in 0..r {
                let values: Vec<Vec<i64>> = shape
                    .iter()
                    .enumerate()
                    .map(|(t, &rk)| (0..rk).map(|j| (t == s && j == i) as i64).collect())
                    .collect();
                aux.push(Character::from_integers(&values));
            }
        }
        let base = Character::from_integers(&base);
        let target_q = BigRational::from_integer(target.into());
        let p = perturb(&base, &target_q, &grams, &aux, &PerturbOptions::default()).map_err(|e| e.to_string())?;
        for (cert, d) in p.certificates.iter().zip(&diag) {
            let g: Vec<Vec<i64>> = (0..d.len())
                .map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { 0 }).collect())
                .collect();
            let shorts: BTreeSet<Vec<i64>> = common::box_enumerate(&g, target * target)
                .into_iter()
                .map(|(x, _)| common::canonical_sign(x))
                .collect();
            let listed: BTreeSet<Vec<i64>> = cert.short_vectors.iter().cloned().collect();
            ensure(listed == shorts, || {
                format!("toy {case}, cusp {}: short vector lists differ", cert.cusp)
            })?;
            for x in &shorts {
                ensure(!p.character.value(cert.cusp, x).is_zero(), || {
                    format!("toy {case}, cusp {}: {x:?} lies in the kernel", cert.cusp)
                })?;
            }
        }
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    homology_suite(&mut rng, 256)?;
    status_suite(&mut rng, 1024)?;
    systole_suite(&mut rng, 64)?;
    perturb_suite(&mut rng, 32)?;
    within(start, Duration::from_secs(600), "property suites")?;
    Ok(format!(
        "256 complexes vs dense oracle, 1024 status walks, 64 lattices vs double-radius search, 32 perturbations re-enumerated, in {:.1?}",
        start.elapsed()
    ))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let p8 = load_p8();
    let criteria: Vec<Criterion> = vec![
        ("P8 census", Box::new(criterion_1)),
        ("colouring statistics", Box::new(|| criterion_2(&p8))),
        ("b1(M8) = 365", Box::new(|| criterion_3(&p8))),
        ("link certification", Box::new(|| criterion_4(&p8))),
        ("cusp surjectivity", Box::new(|| criterion_5(&p8))),
        ("2D oracle suite", Box::new(criterion_6)),
        ("cover growth", Box::new(criterion_7)),
        ("Poincare-Lefschetz sanity", Box::new(criterion_8)),
        ("property suites", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
