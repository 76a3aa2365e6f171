//! `companion`: solve guarded equation systems, check causality, prove language
//! equivalences up to context and inspect companions on finite lattices.

mod commands;
mod diag;
mod sexpr;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::diag::Diag;

#[derive(Parser, Debug)]
#[command(name = "companion", version, about)]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for the sampling checkers. COMPANION_SEED overrides it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the depth-N approximant of a variable or closed term.
    Eval {
        file: PathBuf,
        /// A variable name or an s-expression term.
        target: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Interpret operations through their GSOS rules instead of the registry.
        #[arg(long)]
        gsos: bool,
    },
    /// Search for a causality witness of a declared operation.
    CheckCausal {
        file: PathBuf,
        op: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Prove or refute a goal by bisimulation up to the given combinators.
    Prove {
        file: PathBuf,
        /// Goal name; all goals when omitted.
        goal: Option<String>,
        #[arg(long, default_value = "rfl,ctx")]
        upto: String,
        #[arg(long, default_value_t = 5000)]
        max_pairs: usize,
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
        /// Write the proof certificate to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Compare two stream terms on their first N outputs.
    StreamEq {
        file: PathBuf,
        lhs: String,
        rhs: String,
        #[arg(long, default_value_t = 32)]
        depth: usize,
    },
    /// Independently re-validate a proof certificate.
    Recheck { proof: PathBuf },
    /// Companion, final sequence and coinduction up to on a finite lattice.
    Lattice {
        file: PathBuf,
        /// Name of the monotone function b.
        #[arg(long, default_value = "b")]
        b: String,
        /// Print the companion table of b (the default when neither --check nor --upto is given).
        #[arg(long, conflicts_with_all = ["check", "upto"])]
        table: bool,
        /// Decide whether F lies below the companion of b.
        #[arg(long, value_name = "F")]
        check: Option<String>,
        /// Try to prove x ≤ νb by coinduction up to F.
        #[arg(long, value_name = "F", requires = "x")]
        upto: Option<String>,
        #[arg(long)]
        x: Option<String>,
    },
    /// Rebuild the counterexample showing that the finite powerset functor has no
    /// causal distributive law at a given level.
    KanDemo {
        #[arg(long, default_value_t = 2)]
        level: usize,
    },
}

fn seed(cli: &Cli) -> Result<Option<u64>, Diag> {
    match std::env::var("COMPANION_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| Diag::input("usage", format!("COMPANION_SEED `{s}` is not a number"))),
        Err(_) => Ok(cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = seed(&cli).and_then(|s| commands::run(&cli, s));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(d) => {
            if cli.json {
                println!("{}", d.to_json());
            } else {
                eprintln!("{d}");
            }
            ExitCode::from(d.exit)
        }
    }
}
