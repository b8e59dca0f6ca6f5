//! `relcheck`: refinement, correctness and relative-correctness judgments on
//! the command line.
//!
//! Exit status: 0 when the verdict is true or verification passed, 1 when it
//! is false, 2 on usage or input errors, 3 when the result is inconclusive
//! (fuel ran out or a space is over the exhaustive cap).

mod commands;
mod load;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relcheck_core::Error;

#[derive(Parser)]
#[command(
    name = "relcheck",
    version,
    about = "Relational correctness checker for a small imperative language"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Cap on the number of states an exhaustive computation may enumerate.
    #[arg(long, global = true)]
    pub max_states: Option<usize>,
    /// Range for program declarations written without one, e.g. `0..24`.
    #[arg(long, global = true, value_parser = parse_range)]
    pub default_range: Option<(i64, i64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected lo..hi")?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// Where the state space comes from when no operand carries one.
#[derive(Args)]
pub struct SpaceArgs {
    /// A `.space` file.
    #[arg(long)]
    pub space: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Does LHS refine RHS?
    Refines {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
        /// Take the space from this spec file.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Is the program correct (or partially correct) with respect to the spec?
    Correct {
        #[arg(long)]
        program: PathBuf,
        /// A `.spec` or `.rel` file.
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        partial: bool,
    },
    /// Is the candidate more-correct than the baseline with respect to the spec?
    MoreCorrect {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
        /// A `.spec` or `.rel` file.
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
        /// Require a strict increase of the competence domain (deterministic only).
        #[arg(long, conflicts_with = "nondet")]
        strict: bool,
        /// Use the non-deterministic judgment even for deterministic programs.
        #[arg(long)]
        nondet: bool,
    },
    /// Competence domain dom(R∩P) of a program.
    Competence {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Run the interpreter over this region instead of denoting the program.
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        fuel: Option<u64>,
        /// List the competent states.
        #[arg(long)]
        states: bool,
    },
    /// Probability that a state of dom(R) in the region is in the competence domain.
    Reliability {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Initial region, e.g. `n=1..10000, x=0, y=0`; defaults to the whole space.
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        fuel: Option<u64>,
        /// A state weight, e.g. `(4,0,0)=3`; switches to a weighted distribution.
        #[arg(long = "weight")]
        weights: Vec<String>,
        /// Weight of states not given by --weight.
        #[arg(long, default_value_t = 1)]
        default_weight: u64,
    },
    /// Verify a derivation chain manifest.
    VerifyChain {
        chain: PathBuf,
        /// Override the fuel given in the manifest.
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Print the relation a program denotes.
    Denote {
        #[arg(long)]
        program: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Run a program from one initial state.
    Interpret {
        #[arg(long)]
        program: PathBuf,
        /// Initial state, e.g. `(3,0,0)`.
        #[arg(long)]
        state: String,
        #[arg(long)]
        fuel: Option<u64>,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Compare the interpreter with the denotation on every state.
    Agreement {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        fuel: Option<u64>,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Check a spec's domain clause against witness search.
    ValidateDomain {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        region: Option<String>,
        /// Witness search bounds, e.g. `x=0..100, y=0..100`.
        #[arg(long)]
        bounds: Option<String>,
    },
}

/// Why a command produced no verdict.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Inconclusive(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::Inconclusive(_) | Error::CapExceeded { .. } => Failure::Inconclusive(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// What a command prints and how it exits.
pub struct Report {
    pub code: u8,
    pub table: String,
    pub json: serde_json::Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.global, cli.command) {
        Ok(r) => {
            match cli.global.format {
                Format::Table => print!("{}", r.table),
                Format::Json => println!("{}", serde_json::to_string_pretty(&r.json).expect("report serializes")),
            }
            ExitCode::from(r.code)
        }
        Err(Failure::Usage(msg)) | Err(Failure::Input(msg)) => {
            eprintln!("relcheck: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Inconclusive(msg)) => {
            eprintln!("relcheck: {msg}");
            ExitCode::from(3)
        }
    }
}
