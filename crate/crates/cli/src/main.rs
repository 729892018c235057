//! `counterfact` — generate counterfactual explanations for refuted claims,
//! plus the surrounding corpus, baseline, and statistics tooling.
//!
//! Exit codes: 0 success; 1 record-level errors occurred and `--keep-going`
//! was not given (all records are still processed and written); 2 usage or
//! configuration errors, including unreadable inputs.

mod baseline;
mod config;
mod explain;
mod ingest;
mod output;
mod parallel;
mod stats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "counterfact", version, about = "Counterfactual explanations for refuted claims")]
struct Cli {
    /// Path to a TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Omit generation timestamps so outputs are byte-reproducible.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a claims file, filter by label, optionally sample, and write
    /// canonical JSONL.
    Ingest(IngestArgs),
    /// Run the counterfactual pipeline over refuted claims.
    Explain(ExplainArgs),
    /// Produce summarization-baseline explanations over refuted claims.
    Baseline(BaselineArgs),
    /// Compute annotation-tally and survey-statistics reports.
    Stats(StatsArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Input claims JSONL (FEVER-style records).
    #[arg(long, value_name = "PATH")]
    fever: PathBuf,
    /// Keep only records with this label (SUPPORTED, REFUTED, NOTENOUGHINFO).
    #[arg(long, value_name = "LABEL")]
    label: Option<String>,
    /// Randomly keep exactly this many records (requires a seed).
    #[arg(long, value_name = "N")]
    sample: Option<usize>,
    /// RNG seed for --sample.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Output path (defaults to [output].dir/corpus.jsonl, else stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Exit 0 even when some input lines were malformed.
    #[arg(long)]
    keep_going: bool,
}

#[derive(Args)]
struct ExplainArgs {
    /// Input claims JSONL; only REFUTED records are explained.
    #[arg(long, value_name = "PATH")]
    fever: PathBuf,
    /// Counterfactual forms to render (comma-separated: cf-a,cf-n,cf-m).
    #[arg(long, value_delimiter = ',', value_name = "FORM")]
    forms: Vec<String>,
    /// Randomly keep exactly this many records before explaining.
    #[arg(long, value_name = "N")]
    sample: Option<usize>,
    /// RNG seed for --sample.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Worker threads (default 1 for reproducible ordering).
    #[arg(long, default_value_t = 1, value_name = "N")]
    jobs: usize,
    /// Exit 0 even when some records failed.
    #[arg(long)]
    keep_going: bool,
    /// Output path (defaults to [output].dir/explanations.jsonl, else stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    /// Input claims JSONL; only REFUTED records are summarized.
    #[arg(long, value_name = "PATH")]
    fever: PathBuf,
    /// Summarization method: ext (extractive) or abs (abstractive).
    #[arg(long, value_name = "METHOD")]
    method: String,
    /// Randomly keep exactly this many records before summarizing.
    #[arg(long, value_name = "N")]
    sample: Option<usize>,
    /// RNG seed for --sample.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Worker threads (default 1 for reproducible ordering).
    #[arg(long, default_value_t = 1, value_name = "N")]
    jobs: usize,
    /// Exit 0 even when some records failed.
    #[arg(long)]
    keep_going: bool,
    /// Output path (defaults to [output].dir/baseline-<method>.jsonl, else stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("inputs").required(true).multiple(true).args(["annotations", "survey"])))]
struct StatsArgs {
    /// Error-annotation CSV (claim_id,verdict,category).
    #[arg(long, value_name = "PATH")]
    annotations: Option<PathBuf>,
    /// Survey selection CSV (participant_id,claim_id,familiar,perceived,best,worst).
    #[arg(long, value_name = "PATH")]
    survey: Option<PathBuf>,
    /// Survey groupings (comma-separated: overall,familiarity,perceived).
    #[arg(long, value_delimiter = ',', value_name = "GROUP")]
    group_by: Vec<String>,
    /// Output path (defaults to [output].dir/stats.json, else stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Failures that decide the process exit code.
enum Failure {
    /// Usage, configuration, or unreadable-input problems → exit 2.
    Config(anyhow::Error),
    /// `n` records failed while processing continued → exit 1.
    Records { errors: usize },
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

type CmdResult = Result<(), Failure>;

/// Render an error chain, skipping causes whose text the previous link
/// already embeds (several library errors include their source in Display).
fn render_error(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.ends_with(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", render_error(&e));
            return ExitCode::from(2);
        }
    };
    let with_timestamp = config.timestamp(cli.no_timestamp);

    let outcome = match &cli.command {
        Command::Ingest(args) => ingest::run(args, &config, with_timestamp),
        Command::Explain(args) => explain::run(args, &config, with_timestamp),
        Command::Baseline(args) => baseline::run(args, &config, with_timestamp),
        Command::Stats(args) => stats::run(args, &config, with_timestamp),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {}", render_error(&e));
            ExitCode::from(2)
        }
        Err(Failure::Records { errors }) => {
            eprintln!("error: {errors} record(s) failed (use --keep-going to exit 0)");
            ExitCode::from(1)
        }
    }
}
