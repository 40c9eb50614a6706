//! `chipfire`: runs chip-firing experiments and prints one JSON report on stdout.

mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Failure, Report};

/// Chip-firing experiments on path-like graphs.
#[derive(Debug, Parser)]
#[command(name = "chipfire", version)]
pub struct Cli {
    /// Worker threads for Monte Carlo trials and parallel enumeration.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stabilize n chips at the origin.
    Stabilize(StabilizeArgs),
    /// Enumerate the stable labeled configurations reachable from Δⁿ.
    Enumerate(EnumerateArgs),
    /// Run one of the built-in property suites.
    Verify(VerifyArgs),
    /// Estimate (or compute exactly) the probability that Δⁿ on Z ends sorted.
    Montecarlo(MontecarloArgs),
    /// Test a sorting conjecture by exhaustive search.
    Conjecture(ConjectureArgs),
    /// Fire roots of type A or B from the origin until none applies.
    Vectorfire(VectorfireArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SeedArg {
    /// Master seed; defaults to $CHIPFIRE_SEED, then 0.
    #[arg(long, env = "CHIPFIRE_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    /// Record the move sequence.
    #[arg(long)]
    pub trace: bool,
    /// Longest move sequence to record.
    #[arg(long, default_value_t = 10_000)]
    pub max_trace: usize,
}

#[derive(Debug, Args)]
pub struct StabilizeArgs {
    /// Graph spec, e.g. "Z", "N", "Ndir", "Z loops=0:2", "Z r=2".
    #[arg(long, default_value = "Z")]
    pub graph: String,
    #[arg(long)]
    pub n: u64,
    /// Use labeled chips 1..n instead of n indistinguishable chips.
    #[arg(long)]
    pub labeled: bool,
    /// leftmost_vertex, rightmost_vertex, uniform_move or uniform_vertex_then_pair.
    #[arg(long, default_value = "leftmost_vertex")]
    pub strategy: String,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub trace: TraceArgs,
    /// Maximum number of firings.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Dfs,
    Bfs,
    Parallel,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, default_value = "Z")]
    pub graph: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub max_states: Option<u64>,
    #[arg(long)]
    pub max_seconds: Option<f64>,
    /// List every stable configuration (as a permutation word when possible).
    #[arg(long)]
    pub dump_perms: bool,
    #[arg(long, value_enum, default_value_t = Mode::Dfs)]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// main, runtime, stabcover, bounds, typeb, loops or closedforms.
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 20)]
    pub max_n: u64,
    /// Seeded runs per random strategy.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
}

#[derive(Debug, Args)]
pub struct MontecarloArgs {
    #[arg(long)]
    pub n: u64,
    /// uniform_move, uniform_vertex_then_pair or uniform_sequence.
    #[arg(long)]
    pub protocol: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Compute the exact probability instead of sampling.
    #[arg(long)]
    pub exact: bool,
    /// Largest n accepted by the exact computation.
    #[arg(long)]
    pub guard: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    /// loops, parallel, combined or inversions.
    #[arg(long)]
    pub id: String,
    /// Comma-separated key=value pairs; loop sets are colon-separated, e.g. "s=-1:0:1,n=5".
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub params: String,
    #[arg(long)]
    pub max_states: Option<u64>,
    #[arg(long)]
    pub max_seconds: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VectorfireArgs {
    /// Root system type, A or B.
    #[arg(long = "type", default_value = "B")]
    pub type_tag: String,
    #[arg(long)]
    pub n: usize,
    /// first, last or uniform.
    #[arg(long, default_value = "first")]
    pub strategy: String,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub budget: Option<u64>,
}

fn run(cli: Cli) -> Result<Report, Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::usage(format!("cannot size the thread pool: {e}")))?;
    }
    match cli.command {
        Command::Stabilize(a) => commands::stabilize(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Verify(a) => commands::verify(a),
        Command::Montecarlo(a) => commands::montecarlo(a),
        Command::Conjecture(a) => commands::conjecture(a),
        Command::Vectorfire(a) => commands::vectorfire(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("chipfire: {} check failed", report.command);
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("chipfire: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
