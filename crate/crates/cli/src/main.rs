mod commands;
mod report;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Status;

#[derive(Parser)]
#[command(name = "deftally", version, about = "Default rules and extensions checked by exact model counting")]
pub struct Cli {
    /// Write a JSON report of the run here.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Largest number of region-count vectors one count may visit.
    #[arg(long, global = true, default_value_t = deftally_core::counter::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Override the domain size of the knowledge base.
    #[arg(long, global = true)]
    pub domain: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Derive candidate defaults from the statistics and filter them by delta.
    Generate {
        kb: PathBuf,
        /// Conclusion formula, e.g. `Fly` or `!Fly`; all statistic targets if omitted.
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Compute Reiter extensions or one sequential-thresholding extension.
    Extend {
        kb: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Reiter)]
        mode: Mode,
        /// `greedy`, `declared`, or 1-based rule numbers such as `2,1`.
        #[arg(long, default_value = "greedy")]
        order: String,
        #[arg(long, value_enum, default_value_t = RuleSource::Auto)]
        rules: RuleSource,
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Check every rule for delta-validity by enumerating evidence sets.
    Soundness {
        kb: PathBuf,
        #[arg(long, value_enum, default_value_t = RuleSource::All)]
        rules: RuleSource,
        /// Constants the evidence may mention.
        #[arg(long, default_value_t = 1)]
        constants: usize,
        /// Largest number of evidence sets to enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Build the species-partition knowledge base and run both modes on it.
    Lottery {
        /// Number of species.
        #[arg(long)]
        n: usize,
        /// `lo:hi` for every species, or one `lo:hi` per species separated by commas.
        #[arg(long)]
        intervals: Option<String>,
        #[arg(long, default_value = "greedy")]
        order: String,
        /// Save the generated knowledge base.
        #[arg(long, value_name = "PATH")]
        kb_out: Option<PathBuf>,
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Compare the model counter with brute-force enumeration.
    VerifyOracle {
        /// Knowledge base to check; omit when using --random.
        kb: Option<PathBuf>,
        /// Check this many seeded random world states instead.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of models the oracle may enumerate.
        #[arg(long, default_value_t = deftally_core::oracle::DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = OracleSpace::Raw)]
        space: OracleSpace,
    },
}

#[derive(Args, Clone, Default)]
pub struct Thresholds {
    /// Error bound for generated rules, e.g. `0.05` or `1/20`; overrides `config delta`.
    #[arg(long)]
    pub delta: Option<String>,
    /// Thresholding bound; a rule fires when its proportion exceeds `1 - epsilon*`.
    #[arg(long = "epsilon-star")]
    pub epsilon_star: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Reiter,
    Threshold,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum RuleSource {
    /// Declared rules if the file has any, otherwise generated ones.
    Auto,
    Declared,
    Generated,
    All,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum OracleSpace {
    Raw,
    Filtered,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let started = Instant::now();
    match commands::run(&cli, argv) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if let Some(path) = &cli.report {
                let mut json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
                json.push('\n');
                if let Err(e) = std::fs::write(path, json) {
                    eprintln!("error: cannot write report to {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            eprintln!("elapsed: {} ms", started.elapsed().as_millis());
            match outcome.report.status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Violation => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
