//! `aspectmill` — train, apply, and evaluate hierarchical multi-label
//! review classifiers from the command line.
//!
//! Exit codes: 0 on success, 1 on user/input errors, 2 when an internal
//! invariant check fails. Set `ASPECTMILL_LOG` (error|warn|info|debug) to
//! control stderr logging; every run logs its effective configuration.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aspectmill::architectures::{Architecture, WindowSize};

#[derive(Debug, Parser)]
#[command(
    name = "aspectmill",
    version,
    about = "Hierarchical multi-label classification of review sentences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Tab-separated tables.
    Table,
    /// JSON, one document (or one line per record).
    Machine,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Taxonomy config file; defaults to the bundled hierarchy.
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    /// Gold-annotated training corpus (JSON lines).
    #[arg(long)]
    corpus: PathBuf,
    /// Where to write the trained bundle.
    #[arg(long)]
    bundle: PathBuf,
    /// Classifier arrangement.
    #[arg(long, default_value = "hier")]
    arch: Architecture,
    /// Directory of `*.lex` lexicon files.
    #[arg(long)]
    lexicons: Option<PathBuf>,
    /// Hold out this fraction of reviews before training.
    #[arg(long)]
    split: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    epochs: u32,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    /// Trigger terms per aspect (aspect-polarity arrangement).
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Polarity window radius in tokens, or `inf` for the whole sentence.
    #[arg(long, default_value = "inf")]
    n: WindowSize,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Trained bundle file.
    #[arg(long)]
    bundle: PathBuf,
    /// Corpus file to predict; annotations are optional and ignored.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Verify the gating invariant on every prediction; violations exit 2.
    #[arg(long)]
    check: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Trained bundle file.
    #[arg(long)]
    bundle: PathBuf,
    /// Gold-annotated test corpus.
    #[arg(long)]
    test_corpus: Option<PathBuf>,
    /// Full corpus to split; evaluation uses the held-out fraction.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Held-out fraction (with --corpus); must match the training split.
    #[arg(long)]
    split: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Gold-annotated corpus.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a classifier bundle on an annotated corpus.
    Train(TrainArgs),
    /// Predict categories, aspects, and polarity for each sentence.
    Predict(PredictArgs),
    /// Score a bundle against a gold corpus.
    Eval(EvalArgs),
    /// Corpus statistics: per-label tallies and the positive-ratio
    /// ranking.
    Stats(StatsArgs),
}

/// Failures split by exit code.
enum CliError {
    /// Bad input or usage; exit 1.
    User(String),
    /// An internal invariant did not hold; exit 2.
    Internal(String),
}

impl From<aspectmill::Error> for CliError {
    fn from(err: aspectmill::Error) -> Self {
        CliError::User(err.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("ASPECTMILL_LOG", "info"),
    )
    .format_timestamp(None)
    .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train(args),
        Command::Predict(args) => commands::predict(args),
        Command::Eval(args) => commands::eval(args),
        Command::Stats(args) => commands::stats(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(message)) => {
            eprintln!("invariant violation: {message}");
            ExitCode::from(2)
        }
    }
}
