//! `ternflip`: search, verify and transform ternary matrix multiplication
//! schemes.
//!
//! Exit codes: 0 success, 1 failure (including usage errors), 2 lift found
//! no solution, 3 lift ran out of budget.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ternflip_core::Format;

#[derive(Debug, Parser)]
#[command(
    name = "ternflip",
    version,
    about = "Ternary flip-graph search for matrix multiplication schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SchemesDir {
    /// Registry directory (`<m>x<n>x<p>/rank<r>_c<complexity>.json`).
    #[arg(long, env = "TERNFLIP_SCHEMES", default_value = "schemes")]
    schemes: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Focused,
    Exploratory,
    Complexity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpArg {
    Project,
    Extend,
    Double,
    Swap,
    Product,
    Merge,
    Block,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the Brent equations for each file.
    Verify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run the population search and persist the best schemes.
    Search(SearchArgs),
    /// Lower the additive complexity of a scheme with rank-preserving flips.
    Minimize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file; the scheme is printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lift a scheme valid modulo 2 to coefficients in {-1, 0, 1}.
    Lift {
        /// Scheme file; any signs in it are dropped first.
        #[arg(long = "in")]
        input: PathBuf,
        /// Search node budget.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Number of distinct lifts to look for.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output file for the first lift, or directory when `--count` > 1.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print isotropy invariants.
    Invariants {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Apply one meta operator and write the verified result.
    Transform {
        #[arg(long, value_enum)]
        op: OpArg,
        #[arg(long = "in")]
        input: PathBuf,
        /// Second operand for `product` and `merge`.
        #[arg(long)]
        with: Option<PathBuf>,
        /// Target order of (m, n, p) for `swap`, e.g. `201`.
        #[arg(long, default_value = "102")]
        perm: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the best rank and complexity per format in a registry.
    Info {
        #[command(flatten)]
        dir: SchemesDir,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Formats to search, e.g. `2x3x3`. May be repeated.
    #[arg(long = "format", value_parser = parse_format)]
    formats: Vec<Format>,
    /// Extra starting schemes.
    #[arg(long = "from")]
    from: Vec<PathBuf>,
    /// Start from naive schemes even when the registry has better ones.
    #[arg(long)]
    fresh: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::Focused)]
    mode: ModeArg,
    #[arg(long, default_value_t = 256)]
    population: usize,
    /// Walk steps per slot and cycle.
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of walk/resize cycles.
    #[arg(long, default_value_t = 10)]
    cycles: usize,
    /// Wall-clock budget in seconds, checked at synchronization points.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Stop once every searched format reaches this rank.
    #[arg(long)]
    target_rank: Option<usize>,
    #[arg(long)]
    p_reduce: Option<f64>,
    #[arg(long)]
    p_expand: Option<f64>,
    #[arg(long)]
    p_resize: Option<f64>,
    /// Worker threads; 0 uses all cores, 1 is the reproducible mode.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[command(flatten)]
    dir: SchemesDir,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: ternflip_core::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
