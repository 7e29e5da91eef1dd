use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use cubist::characters::{
    choi_park_b1, iota_star_matrix, perturb, surjectivity_conditions, two_pi_check, verify_certificate, PerturbOptions,
    Surjectivity,
};
use cubist::cubulation::{CubeComplex, CyclicCover};
use cubist::formats::{
    read_json, write_json, CharacterFile, ColouringFile, GramFile, MovesFile, PolytopeFile, StateFile, SymmetriesFile,
    FORMAT_VERSION,
};
use cubist::game::{classify_all, Moves, State};
use cubist::gosset::{frame_colouring, gosset_p8_with_roots};
use cubist::homology::Field;
use cubist::morse::{check_links_with, LinkOptions};
use cubist::polytope::{cusp_count, Colouring, Polytope};
use cubist::Error;

use crate::{Cli, Command, GameInputs, Inputs};

pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub pass: bool,
}

/// Library errors that are a negative answer rather than bad input.
fn is_verdict(e: &Error) -> bool {
    matches!(
        e,
        Error::CellCapExceeded { .. }
            | Error::DimensionBound { .. }
            | Error::BadPairPresent(..)
            | Error::NotACocycle { .. }
            | Error::NonCoherent(_)
            | Error::NoSolutionWithinBound(_)
    )
}

fn verdict_failure(command: &str, e: Error) -> anyhow::Result<Outcome> {
    if is_verdict(&e) {
        Ok(Outcome {
            report: json!({ "command": command, "error": e.to_string() }),
            summary: format!("{command}: {e}"),
            pass: false,
        })
    } else {
        Err(e.into())
    }
}

fn load<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    read_json(path).with_context(|| format!("reading {what} file {}", path.display()))
}

fn load_polytope(path: &Path) -> anyhow::Result<Polytope> {
    let f: PolytopeFile = load(path, "polytope")?;
    Ok(Polytope::try_from(f)?)
}

fn load_colouring(path: Option<&Path>, p: &Polytope) -> anyhow::Result<Colouring> {
    let Some(path) = path else {
        bail!("this command needs --colouring");
    };
    let c: Colouring = load::<ColouringFile>(path, "colouring")?.into();
    let report = c.validate(p);
    if !report.is_valid() {
        bail!("invalid colouring: {}", report.violations[0]);
    }
    Ok(c)
}

struct GameData {
    polytope: Polytope,
    colouring: Colouring,
    state: State,
    moves: Moves,
}

fn load_game(inputs: &GameInputs) -> anyhow::Result<GameData> {
    let polytope = load_polytope(&inputs.base.polytope)?;
    let colouring = load_colouring(inputs.base.colouring.as_deref(), &polytope)?;
    let state: State = load::<StateFile>(&inputs.state, "state")?.into();
    if state.stati().len() != polytope.num_facets() {
        bail!(
            "state has {} entries, polytope has {} facets",
            state.stati().len(),
            polytope.num_facets()
        );
    }
    let moves = match &inputs.moves {
        Some(path) => load::<MovesFile>(path, "moves")?.into_moves(colouring.palette())?,
        None => Moves::discrete(colouring.palette()),
    };
    Ok(GameData {
        polytope,
        colouring,
        state,
        moves,
    })
}

/// Parses `6.3`, `-2`, or `13/2` exactly.
fn parse_rational(s: &str) -> anyhow::Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).context("numerator")?;
        let d = BigInt::from_str(d.trim()).context("denominator")?;
        if d == BigInt::from(0) {
            bail!("zero denominator");
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        bail!("not a number: {s}");
    }
    let digits = format!("{int}{frac}");
    let n = BigInt::from_str(&digits).with_context(|| format!("not a number: {s}"))?;
    Ok(BigRational::new(n, BigInt::from(10).pow(frac.len() as u32)))
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let mut outcome = match &cli.command {
        Command::GenP8 { output, colouring } => gen_p8(output, colouring.as_deref()),
        Command::Validate { inputs } => validate(inputs),
        Command::Game { inputs } => game(inputs),
        Command::Cubulate {
            inputs,
            dim,
            cap,
            state,
            moves,
        } => cubulate(inputs, *dim, *cap, state.as_deref(), moves.as_deref()),
        Command::Links {
            inputs,
            k,
            tietze_budget,
            full,
            symmetries,
        } => links(inputs, *k, cli.jobs, *tietze_budget, *full, symmetries.as_deref()),
        Command::Cusps { inputs } => cusps(inputs),
        Command::B1 { inputs } => b1(inputs),
        Command::Cover { inputs, ell, cap } => cover(inputs, *ell, *cap),
        Command::Perturb {
            character,
            gram,
            aux,
            target,
            max_numerator,
            max_denominator,
            max_candidates,
        } => {
            let opts = PerturbOptions {
                max_numerator: *max_numerator,
                max_denominator: *max_denominator,
                max_candidates: *max_candidates,
            };
            perturb_cmd(character, gram, aux, target, &opts)
        }
    }?;
    if let Value::Object(map) = &mut outcome.report {
        map.insert("format_version".into(), json!(FORMAT_VERSION));
        map.insert("seed".into(), json!(cli.seed));
        map.insert("jobs".into(), json!(cli.jobs));
        map.insert("pass".into(), json!(outcome.pass));
    }
    Ok(outcome)
}

fn gen_p8(output: &Path, colouring: Option<&Path>) -> anyhow::Result<Outcome> {
    let (p, roots) = gosset_p8_with_roots();
    write_json(output, &PolytopeFile::from(&p))?;
    if let Some(path) = colouring {
        write_json(path, &ColouringFile::from(&frame_colouring(&roots)))?;
    }
    let report = json!({
        "command": "gen-p8",
        "facets": p.num_facets(),
        "finite_vertices": p.finite_vertices().len(),
        "ideal_vertices": p.ideal_vertices().len(),
        "adjacent_pairs": p.num_adjacent_pairs(),
        "provenance": "gosset::gosset_p8_with_roots",
    });
    let summary = format!(
        "P8: {} facets, {} finite vertices, {} ideal vertices",
        p.num_facets(),
        p.finite_vertices().len(),
        p.ideal_vertices().len()
    );
    Ok(Outcome {
        report,
        summary,
        pass: true,
    })
}

fn validate(inputs: &Inputs) -> anyhow::Result<Outcome> {
    let p = load_polytope(&inputs.polytope)?;
    let mut violations = p.validate().violations;
    if let Some(path) = &inputs.colouring {
        let c: Colouring = load::<ColouringFile>(path, "colouring")?.into();
        violations.extend(c.validate(&p).violations);
    }
    let messages: Vec<String> = violations.iter().map(ToString::to_string).collect();
    let pass = violations.is_empty();
    let summary = if pass {
        "valid".to_string()
    } else {
        format!("{} violation(s):\n  {}", messages.len(), messages.join("\n  "))
    };
    Ok(Outcome {
        report: json!({
            "command": "validate",
            "valid": pass,
            "violations": violations,
            "messages": messages,
            "provenance": "Polytope::validate, Colouring::validate",
        }),
        summary,
        pass,
    })
}

fn game(inputs: &GameInputs) -> anyhow::Result<Outcome> {
    let g = load_game(inputs)?;
    let report = classify_all(&g.polytope, &g.colouring, &g.state, &g.moves);
    let summary = format!(
        "very good {}, good {}, bad {}; coherent: {}, cocycle: {}",
        report.very_good, report.good, report.bad, report.coherent, report.cocycle_ok
    );
    Ok(Outcome {
        pass: report.cocycle_ok,
        report: json!({
            "command": "game",
            "balanced": g.state.is_balanced(&g.colouring),
            "classification": report,
            "provenance": "game::classify_all",
        }),
        summary,
    })
}

fn cubulate(
    inputs: &Inputs,
    dim: Option<usize>,
    cap: u64,
    state: Option<&Path>,
    moves: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let p = load_polytope(&inputs.polytope)?;
    let c = load_colouring(inputs.colouring.as_deref(), &p)?;
    let dim = dim.unwrap_or(p.dim());
    let mut cx = match CubeComplex::build(&p, &c, dim, cap) {
        Ok(cx) => cx,
        Err(e) => return verdict_failure("cubulate", e),
    };
    let counts = cx.cell_counts();
    let mut report = json!({
        "command": "cubulate",
        "palette": c.palette(),
        "built_dim": cx.built_dim(),
        "cells": counts.counts.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        "euler_characteristic": counts.euler_characteristic.map(|x| x.to_string()),
        "provenance": "CubeComplex::build",
    });
    let mut pass = true;
    let mut summary = format!("cells {:?}", counts.counts);
    if let Some(chi) = counts.euler_characteristic {
        summary.push_str(&format!(", Euler characteristic {chi}"));
    }
    if let Some(state) = state {
        let inputs = GameInputs {
            base: inputs.clone(),
            state: state.to_path_buf(),
            moves: moves.map(Path::to_path_buf),
        };
        let g = load_game(&inputs)?;
        let cocycle = cx.unit_cocycle(&p, &c, &g.state, &g.moves);
        pass = cocycle.is_ok();
        report["cocycle"] = match &cocycle {
            Ok(_) => json!({"closed": true, "squares_checked": cx.num_cells(2)}),
            Err(e) => json!({"closed": false, "error": e.to_string()}),
        };
        summary.push_str(if pass {
            "; unit cocycle closed"
        } else {
            "; no unit cocycle"
        });
    }
    Ok(Outcome { report, summary, pass })
}

fn links(
    inputs: &GameInputs,
    k: usize,
    jobs: usize,
    budget: usize,
    full: bool,
    symmetries: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let g = load_game(inputs)?;
    let symmetries = match symmetries {
        Some(path) => load::<SymmetriesFile>(path, "symmetries")?.symmetries,
        None => Vec::new(),
    };
    let opts = LinkOptions {
        k,
        jobs,
        tietze_budget: budget,
        symmetries,
    };
    let r = match check_links_with(&g.polytope, &g.colouring, &g.state, &g.moves, &opts) {
        Ok(r) => r,
        Err(e) => return verdict_failure("links", e),
    };
    let listed: Vec<Value> = if full {
        r.links.iter().map(|l| json!(l)).collect()
    } else {
        let mut idx: Vec<usize> = r.failures.iter().chain(&r.unknowns).copied().collect();
        idx.sort_unstable();
        idx.dedup();
        idx.iter().map(|&i| json!({"index": i, "link": r.links[i]})).collect()
    };
    let pass = r.verdict() && r.unknowns.is_empty();
    let verdict = if r.verdict() {
        format!("F_{k}")
    } else {
        format!("not certified beyond F_{}", r.certified_degree)
    };
    let summary = format!(
        "{} link patterns, {} failures, {} unknown; verdict {verdict}",
        r.num_patterns,
        r.failures.len(),
        r.unknowns.len()
    );
    Ok(Outcome {
        report: json!({
            "command": "links",
            "k": k,
            "num_patterns": r.num_patterns,
            "symmetry_orbits": r.symmetry_orbits,
            "failures": r.failures.len(),
            "unknowns": r.unknowns.len(),
            "certified_degree": r.certified_degree,
            "verdict": verdict,
            "links": listed,
            "provenance": "morse::check_links_with",
        }),
        summary,
        pass,
    })
}

fn cusps(inputs: &Inputs) -> anyhow::Result<Outcome> {
    let p = load_polytope(&inputs.polytope)?;
    let c = load_colouring(inputs.colouring.as_deref(), &p)?;
    let count = cusp_count(&p, &c);
    let mut verdicts = BTreeMap::<String, usize>::new();
    let mut by_condition = BTreeMap::<String, usize>::new();
    let mut diagonal = BTreeMap::<i64, usize>::new();
    let mut off_diagonal_zero = true;
    for v in 0..p.ideal_vertices().len() {
        let s = surjectivity_conditions(&p, &c, v)?;
        *verdicts.entry(format!("{:?}", s.verdict)).or_default() += 1;
        for cond in &s.conditions {
            *by_condition.entry(format!("{cond:?}")).or_default() += 1;
        }
        for (j, row) in iota_star_matrix(&p, &c, v, 0)?.into_iter().enumerate() {
            if let Some(row) = row {
                *diagonal.entry(row[j]).or_default() += 1;
                off_diagonal_zero &= row.iter().enumerate().all(|(i, &x)| i == j || x == 0);
            }
        }
    }
    let all_surjective = verdicts.keys().all(|k| k == &format!("{:?}", Surjectivity::Surjective));
    let summary = format!(
        "{} cusps over {} ideal vertices; verdicts {:?}",
        count.total,
        p.ideal_vertices().len(),
        verdicts
    );
    Ok(Outcome {
        report: json!({
            "command": "cusps",
            "total": count.total.to_string(),
            "by_link_colours": count.by_link_colours.iter()
                .map(|(k, (verts, cusps))| (k.to_string(), json!({"ideal_vertices": verts, "cusps": cusps.to_string()})))
                .collect::<serde_json::Map<_, _>>(),
            "surjectivity": verdicts,
            "pair_conditions": by_condition,
            "constructed_cocycle_values": diagonal,
            "off_diagonal_zero": off_diagonal_zero,
            "provenance": "polytope::cusp_count, characters::surjectivity_conditions, characters::iota_star_matrix",
        }),
        summary,
        pass: all_surjective && !p.ideal_vertices().is_empty(),
    })
}

fn b1(inputs: &Inputs) -> anyhow::Result<Outcome> {
    let p = load_polytope(&inputs.polytope)?;
    let c = load_colouring(inputs.colouring.as_deref(), &p)?;
    let b1 = choi_park_b1(&p, &c)?;
    Ok(Outcome {
        report: json!({"command": "b1", "b1": b1, "provenance": "characters::choi_park_b1"}),
        summary: format!("b1 = {b1}"),
        pass: true,
    })
}

fn cover(inputs: &GameInputs, ell: u64, cap: u64) -> anyhow::Result<Outcome> {
    let g = load_game(inputs)?;
    let mut cx = match CubeComplex::build(&g.polytope, &g.colouring, g.polytope.dim(), cap) {
        Ok(cx) => cx,
        Err(e) => return verdict_failure("cover", e),
    };
    let z = match cx.unit_cocycle(&g.polytope, &g.colouring, &g.state, &g.moves) {
        Ok(z) => z,
        Err(e) => return verdict_failure("cover", e),
    };
    let chi = cx.euler_characteristic()?;
    let cov = CyclicCover::new(&cx, &z, ell)?;
    let chain = cov.chain_complex();
    let top = chain.dims().len() - 1;
    let betti = chain.betti(Field::Q, top)?;
    let cover_chi = cov.euler_characteristic()?;
    let pass = cover_chi == ell as i64 * chi;
    Ok(Outcome {
        report: json!({
            "command": "cover",
            "ell": ell,
            "base_euler_characteristic": chi,
            "cover_euler_characteristic": cover_chi,
            "cover_betti_q": betti,
            "cells": chain.dims(),
            "provenance": "cubulation::CyclicCover, homology::ChainComplex::betti",
        }),
        summary: format!("{ell}-fold cover: Betti numbers {betti:?}, Euler characteristic {cover_chi}"),
        pass,
    })
}

fn perturb_cmd(
    character: &Path,
    gram: &Path,
    aux: &[std::path::PathBuf],
    target: &str,
    opts: &PerturbOptions,
) -> anyhow::Result<Outcome> {
    let base = load::<CharacterFile>(character, "character")?.to_character()?;
    let grams = load::<GramFile>(gram, "Gram")?.to_grams()?;
    let aux = aux
        .iter()
        .map(|p| {
            load::<CharacterFile>(p, "character")?
                .to_character()
                .map_err(Into::into)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let target = parse_rational(target)?;
    let p = match perturb(&base, &target, &grams, &aux, opts) {
        Ok(p) => p,
        Err(e) => return verdict_failure("perturb", e),
    };
    let verified = verify_certificate(&p, &grams);
    let two_pi = two_pi_check(&p.character.values, &grams)?;
    let character = CharacterFile::from_character(&p.character)?;
    Ok(Outcome {
        summary: format!(
            "lambda = [{}] after {} candidates; certificate verified: {verified}",
            p.lambda.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
            p.candidates_tried
        ),
        report: json!({
            "command": "perturb",
            "perturbation": p,
            "character": character,
            "certificate_verified": verified,
            "two_pi": two_pi,
            "provenance": "characters::perturb, characters::verify_certificate, characters::two_pi_check",
        }),
        pass: verified,
    })
}
