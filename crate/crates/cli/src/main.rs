//! `lyricstat`: lyrics corpus analytics from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lyricstat::corpus::InputFormat;
use lyricstat::weat::OovPolicy;

#[derive(Debug, Parser)]
#[command(name = "lyricstat", about = "Lyric style metrics and word-embedding association tests", version)]
struct Cli {
    /// Log progress to standard error.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read a song file into a tokenized corpus cache.
    Ingest(IngestArgs),
    /// Write per-song, aggregate, top-word and rank CSV tables.
    Style(StyleArgs),
    /// Train skip-gram word vectors on a corpus cache.
    Train(TrainArgs),
    /// Run a WEAT battery against a vector file.
    Weat(WeatArgs),
    /// Print version information.
    Version,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<InputFormat>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub year_min: Option<i32>,
    #[arg(long)]
    pub year_max: Option<i32>,
    /// Fail with exit code 2 when more than this fraction of records is rejected.
    #[arg(long)]
    pub max_reject_fraction: Option<f64>,
    /// Keep bracketed annotation lines such as "[Chorus]".
    #[arg(long)]
    pub keep_annotations: bool,
}

#[derive(Debug, Args)]
pub struct StyleArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Words for the rank series, comma separated [default: rock,blues].
    #[arg(long, value_delimiter = ',')]
    pub words: Option<Vec<String>>,
    /// Number of top words per year [default: 100].
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Restrict top words to one year.
    #[arg(long)]
    pub year: Option<i32>,
    /// Cohort for top words and ranks: popular, other or all [default: popular].
    #[arg(long)]
    pub cohort: Option<String>,
    /// Swear word list replacing the bundled one.
    #[arg(long)]
    pub swear_words: Option<PathBuf>,
    /// Stopword list replacing the bundled one.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Do not filter stopwords from top words.
    #[arg(long)]
    pub no_stopwords: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub cache: PathBuf,
    /// Output directory; vectors are written to vectors.txt.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub subsample: Option<f64>,
    /// Random seed (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Single-threaded, bitwise reproducible training.
    #[arg(long, conflicts_with = "threads")]
    pub deterministic: bool,
    /// Worker threads for lock-free parallel training.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WeatArgs {
    #[arg(long)]
    pub vectors: PathBuf,
    /// Test battery JSON; the bundled eight tests when omitted.
    #[arg(long)]
    pub tests: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub policy: Option<OovPolicy>,
    /// Enumerate every partition instead of sampling.
    #[arg(long, conflicts_with = "samples")]
    pub exact: bool,
    /// Monte Carlo sample count [default: 100000].
    #[arg(long)]
    pub samples: Option<u64>,
    /// Seed for Monte Carlo p-values (required unless --exact).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Count partitions that tie the observed statistic.
    #[arg(long)]
    pub inclusive: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Ingest(args) => commands::ingest(&args),
        Command::Style(args) => commands::style(&args),
        Command::Train(args) => commands::train(&args),
        Command::Weat(args) => commands::weat(&args),
        Command::Version => {
            println!("lyricstat {}", env!("CARGO_PKG_VERSION"));
            println!("corpus cache format {}", lyricstat::corpus::CACHE_VERSION);
            Ok(commands::Status::Ok)
        }
    };
    match result {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
