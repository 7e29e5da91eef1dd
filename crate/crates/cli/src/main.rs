//! `cubist`: batch front-end for the polytope / cube complex pipeline.
//!
//! Every subcommand prints a JSON report on stdout and a short summary on
//! stderr. Exit status: 0 when the verdict passes, 1 when it fails, 2 on
//! unusable input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Keep the literal in step with `cubist::formats::FORMAT_VERSION`.
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (data format 1)");

#[derive(Parser, Debug)]
#[command(name = "cubist", version = VERSION, about = "Coloured right-angled polytopes, cube complexes and their links")]
pub struct Cli {
    /// Worker threads for parallel stages (0 = all cores).
    #[arg(long, global = true, env = "CUBIST_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Seed recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Inputs {
    #[arg(long)]
    pub polytope: PathBuf,
    #[arg(long)]
    pub colouring: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GameInputs {
    #[command(flatten)]
    pub base: Inputs,
    #[arg(long)]
    pub state: PathBuf,
    /// Moves file; the discrete partition when omitted.
    #[arg(long)]
    pub moves: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the right-angled polytope dual to the Gosset polytope.
    GenP8 {
        #[arg(long)]
        output: PathBuf,
        /// Also write its 15-colouring by orthogonal frames.
        #[arg(long)]
        colouring: Option<PathBuf>,
    },
    /// Check a polytope and optionally a colouring.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Classify adjacent facet pairs for a state and moves.
    Game {
        #[command(flatten)]
        inputs: GameInputs,
    },
    /// Build the dual cube complex and report cell counts.
    Cubulate {
        #[command(flatten)]
        inputs: Inputs,
        /// Highest cube dimension to build (default: the polytope dimension).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = cubist::cubulation::DEFAULT_CELL_CAP)]
        cap: u64,
        /// State for the orientation and cocycle check.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, requires = "state")]
        moves: Option<PathBuf>,
    },
    /// Check every ascending and descending link.
    Links {
        #[command(flatten)]
        inputs: GameInputs,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = cubist::homology::DEFAULT_TIETZE_BUDGET)]
        tietze_budget: usize,
        /// Include every link in the report, not only failures.
        #[arg(long)]
        full: bool,
        /// Symmetries file; one link per orbit is checked after each
        /// symmetry is verified.
        #[arg(long)]
        symmetries: Option<PathBuf>,
    },
    /// Cusp counts and surjectivity of the cusp restriction maps.
    Cusps {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// First Betti number from the colour-subset decomposition.
    B1 {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Homology of a finite cyclic cover of the cube complex.
    Cover {
        #[command(flatten)]
        inputs: GameInputs,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = cubist::cubulation::DEFAULT_CELL_CAP)]
        cap: u64,
    },
    /// Perturb a character so its cusp kernels have large systole.
    Perturb {
        #[arg(long)]
        character: PathBuf,
        #[arg(long)]
        gram: PathBuf,
        /// Auxiliary characters, repeatable.
        #[arg(long)]
        aux: Vec<PathBuf>,
        /// Length bound, as a decimal or a fraction.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 4)]
        max_numerator: i64,
        #[arg(long, default_value_t = 4)]
        max_denominator: i64,
        #[arg(long, default_value_t = 1_000_000)]
        max_candidates: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&outcome.report).expect("report serializes")
            );
            eprintln!("{}", outcome.summary);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
