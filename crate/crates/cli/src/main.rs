//! `hyperkube`: experiment runner and ad-hoc query tool.
//!
//! Exit codes: 0 success, 1 I/O or fixture failure, 2 invalid arguments,
//! 3 a verification property failed.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperkube::sim::SearchKind;

#[derive(Debug, Parser)]
#[command(name = "hyperkube", version, about = "Hypercube keyword DHT simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment cell and write results, summary and metadata.
    Run(RunArgs),
    /// Run a grid of cells (dimensions x object counts x search kinds).
    Sweep(SweepArgs),
    /// Load a fixture and answer one query, printing JSON.
    Query(QueryArgs),
    /// Check routing, tree coverage and query answers against brute force.
    Verify(VerifyArgs),
}

/// Seed flag: an integer, or `random`.
#[derive(Debug, Clone, Copy)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

impl SeedArg {
    pub fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Random => rand::random(),
        }
    }
}

fn parse_seed(s: &str) -> Result<SeedArg, String> {
    if s == "random" {
        return Ok(SeedArg::Random);
    }
    s.parse()
        .map(SeedArg::Fixed)
        .map_err(|_| format!("expected an integer or `random`, got {s:?}"))
}

#[derive(Debug, Clone, Args)]
pub struct WorkloadArgs {
    /// Queries per repetition.
    #[arg(long, default_value_t = 1)]
    pub queries: usize,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    /// Superset object limit.
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
    #[arg(long, default_value = "42", value_parser = parse_seed)]
    pub seed: SeedArg,
    /// Use a synthetic kw0000.. vocabulary of this size instead of one word
    /// per dimension.
    #[arg(long)]
    pub vocab: Option<usize>,
    /// Draw object keyword-set sizes uniformly from [kw-min, kw-max]
    /// (defaults 1 and 5) instead of uniform random subsets.
    #[arg(long = "kw-min")]
    pub kw_min: Option<usize>,
    #[arg(long = "kw-max")]
    pub kw_max: Option<usize>,
    #[arg(long = "qkw-min", default_value_t = 1)]
    pub qkw_min: usize,
    #[arg(long = "qkw-max", default_value_t = 3)]
    pub qkw_max: usize,
    #[arg(long = "match-bias", default_value_t = 0.5)]
    pub match_bias: f64,
    /// Output directory.
    #[arg(long, env = "HYPERKUBE_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Also write every query's hop trace as JSON Lines.
    #[arg(long = "emit-traces")]
    pub emit_traces: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Hypercube dimension (2^r logical nodes).
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub objects: usize,
    #[arg(long, default_value = "pin")]
    pub search: SearchKind,
    #[command(flatten)]
    pub workload: WorkloadArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "r-list", value_delimiter = ',', default_value = "7,8,9,10,11,12,13")]
    pub r_list: Vec<u32>,
    #[arg(long = "objects-list", value_delimiter = ',', default_value = "100,1000,10000")]
    pub objects_list: Vec<usize>,
    /// Restrict to one search kind; both by default.
    #[arg(long)]
    pub search: Option<SearchKind>,
    #[command(flatten)]
    pub workload: WorkloadArgs,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// JSON Lines fixture: {"keywords": [...], "root": "<81 trytes>"}.
    #[arg(long)]
    pub fixture: PathBuf,
    /// Comma-separated query keywords.
    #[arg(long, value_delimiter = ',', required = true)]
    pub keywords: Vec<String>,
    #[arg(long, default_value = "pin")]
    pub search: SearchKind,
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
    #[arg(long, default_value_t = 8)]
    pub r: u32,
    /// Start node as an MSB-first bit string; random when absent.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, default_value = "42", value_parser = parse_seed)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    pub r: u32,
    #[arg(long, default_value_t = 200)]
    pub objects: usize,
    #[arg(long, default_value_t = 200)]
    pub queries: usize,
    #[arg(long, default_value = "42", value_parser = parse_seed)]
    pub seed: SeedArg,
    /// Swap in a collision-blind match predicate (mutation check).
    #[arg(long, hide = true)]
    pub mutate: bool,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(anyhow::Error),
    Property,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => commands::run(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Query(args) => commands::query(args),
        Command::Verify(args) => commands::verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Property) => ExitCode::from(3),
    }
}
