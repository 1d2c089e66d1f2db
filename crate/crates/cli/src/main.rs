//! `lexdiv`: compare two comment corpora by rank-turbulence divergence.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 on a data error.

mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::RunConfig;

/// A problem with how the tool was invoked rather than with the data.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Parser, Debug)]
#[command(
    name = "lexdiv",
    version,
    about = "Rank-divergence comparison of comment corpora"
)]
struct Cli {
    /// Worker threads; 0 uses one per core. Outputs do not depend on it.
    #[arg(long, global = true, env = "LEXDIV_THREADS", default_value_t = 0)]
    threads: usize,
    /// Seed for every random choice; overrides the config.
    #[arg(long, global = true, env = "LEXDIV_SEED")]
    seed: Option<u64>,
    /// JSON run configuration; flags take precedence over it.
    #[arg(long, global = true, env = "LEXDIV_CONFIG")]
    config: Option<PathBuf>,
    /// Directory for outputs; overrides the config.
    #[arg(long, global = true, env = "LEXDIV_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse, filter and clean dumps into n-gram tables and comment series.
    Ingest(IngestArgs),
    /// Tie-averaged ranks over the combined lexicon of two tables.
    Rank(PairArgs),
    /// Per-type divergence report for two tables.
    Divergence(DivergenceArgs),
    /// Allotaxonograph SVG and its data bundle.
    Allotax(AllotaxArgs),
    /// Most biased bigrams and trigrams containing given terms.
    Ngrams(NgramsArgs),
    /// Narratively dominant term per month and lag.
    Dominance(DominanceArgs),
    /// Monthly relative frequency of terms.
    Series(SeriesArgs),
    /// Augmented Dickey-Fuller tests on monthly series.
    Adf(AdfArgs),
    /// Pairwise two-sample Kolmogorov-Smirnov tests.
    Ks(KsArgs),
    /// Bootstrap distribution of the sample mean.
    Bootstrap(BootstrapArgs),
    /// Values sorted descending against ordinal rank.
    Zipf(ColumnArgs),
    /// Comments per UTC day with empty days filled in.
    Daily(ColumnArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct IngestArgs {
    /// Dump files (NDJSON, optionally .zst or .gz); defaults to the config's corpora.
    #[arg(short, long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Download a dump into <out-dir>/downloads first, resuming partial files.
    #[arg(long = "url")]
    pub urls: Vec<String>,
    /// Label for `--input`/`--url` dumps.
    #[arg(long, default_value = "corpus")]
    pub label: String,
    /// N-gram orders, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    /// Fail on the first malformed line.
    #[arg(long)]
    pub strict: bool,
    /// Keep only records from these sources (comma-separated).
    #[arg(long = "source", value_delimiter = ',')]
    pub sources: Vec<String>,
    /// Also write per-month unigram tables for `dominance` and `series`.
    #[arg(long)]
    pub monthly: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PairArgs {
    /// Frequency table of system A.
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Frequency table of system B; A alone is ranked over its own types.
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Output name prefix.
    #[arg(long, default_value = "ranks")]
    pub out: String,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum ReportFormat {
    Tsv,
    Json,
}

#[derive(Args, Debug, Serialize)]
pub struct DivergenceArgs {
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: ReportFormat,
    /// Keep only the first N entries.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long, default_value = "divergence")]
    pub out: String,
}

#[derive(Args, Debug, Serialize)]
pub struct AllotaxArgs {
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub bins_per_decade: Option<u32>,
    /// Entries in the shift list.
    #[arg(long, default_value_t = 40)]
    pub shift_len: usize,
    /// Only label cells beyond this rank.
    #[arg(long, default_value_t = 100.0)]
    pub min_label_rank: f64,
    /// Style JSON (colors, fonts, size, seed).
    #[arg(long)]
    pub style: Option<PathBuf>,
    /// SVG path, relative to the output directory.
    #[arg(long, default_value = "allotax.svg")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum Target {
    A,
    B,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum Scope {
    SubLexicon,
    FullTable,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum TableFormat {
    Tsv,
    Text,
}

#[derive(Args, Debug, Serialize)]
pub struct NgramsArgs {
    /// N-gram tables of system A, one per order.
    #[arg(long)]
    pub a: Vec<PathBuf>,
    /// N-gram tables of system B, one per order.
    #[arg(long)]
    pub b: Vec<PathBuf>,
    /// Query term; a comma-separated group matches any of its tokens.
    #[arg(long = "term", required = true)]
    pub terms: Vec<String>,
    /// Restrict to one order; default is every order given for both systems.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "a")]
    pub target: Target,
    #[arg(long, value_enum, default_value = "sub-lexicon")]
    pub scope: Scope,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: TableFormat,
    #[arg(long, default_value = "ngrams")]
    pub out: String,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum Mode {
    Divergence,
    RawRankGain,
}

#[derive(Args, Debug, Serialize)]
pub struct DominanceArgs {
    /// Directory of monthly unigram tables written by `ingest --monthly`.
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// Lags in months, comma-separated or repeated.
    #[arg(long = "lag", value_delimiter = ',')]
    pub lags: Vec<u32>,
    #[arg(long, value_enum, default_value = "divergence")]
    pub mode: Mode,
    #[arg(long, default_value = "dominance")]
    pub out: String,
}

#[derive(Args, Debug, Serialize)]
pub struct SeriesArgs {
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// Term; a comma-separated group is summed. Repeat for several series.
    /// Written as `<terms>.series.tsv`, group members joined by `+`.
    #[arg(long = "term", required = true)]
    pub terms: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct AdfArgs {
    /// Two-column series files.
    #[arg(short, long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Compute series from a panel instead (with `--term`).
    #[arg(long)]
    pub panel: Option<PathBuf>,
    #[arg(long = "term")]
    pub terms: Vec<String>,
    /// Include a linear trend in the test regression.
    #[arg(long)]
    pub trend: bool,
    /// Largest lag considered; default is the Schwert bound.
    #[arg(long)]
    pub max_lags: Option<usize>,
    /// Use `--max-lags` as is instead of pruning.
    #[arg(long, requires = "max_lags")]
    pub fixed_lags: bool,
    #[arg(long, default_value = "adf.tsv")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum KsKind {
    Asymptotic,
    Subsampled,
}

#[derive(Args, Debug, Serialize)]
pub struct KsArgs {
    /// Sample files (at least two); every pair is tested.
    #[arg(short, long = "input", num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "tokens")]
    pub column: String,
    #[arg(long, value_enum, default_value = "subsampled")]
    pub mode: KsKind,
    #[arg(long, default_value_t = 1000)]
    pub size: usize,
    #[arg(long, default_value_t = 100)]
    pub repetitions: usize,
    #[arg(long, default_value = "ks.tsv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct BootstrapArgs {
    #[arg(short, long = "input", num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "tokens")]
    pub column: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Draw size as a fraction of the sample.
    #[arg(long, default_value_t = 0.1)]
    pub fraction: f64,
    #[arg(long, default_value = "bootstrap")]
    pub out: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ColumnArgs {
    /// Comment files written by `ingest`.
    #[arg(short, long = "input", num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    /// Column to read; `tokens` for zipf, `created_utc` for daily.
    #[arg(long)]
    pub column: Option<String>,
}

/// Everything a subcommand needs besides its own arguments.
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
}

fn setup(cli: &Cli) -> anyhow::Result<Context> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        config.out_dir = d.clone();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    Ok(Context {
        out_dir: config.out_dir.clone(),
        seed: config.seed,
        config,
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx = setup(&cli)?;
    match &cli.command {
        Command::Ingest(a) => commands::ingest(&ctx, a),
        Command::Rank(a) => commands::rank(&ctx, a),
        Command::Divergence(a) => commands::divergence(&ctx, a),
        Command::Allotax(a) => commands::allotax(&ctx, a),
        Command::Ngrams(a) => commands::ngrams(&ctx, a),
        Command::Dominance(a) => commands::dominance(&ctx, a),
        Command::Series(a) => commands::series(&ctx, a),
        Command::Adf(a) => commands::adf(&ctx, a),
        Command::Ks(a) => commands::ks(&ctx, a),
        Command::Bootstrap(a) => commands::bootstrap(&ctx, a),
        Command::Zipf(a) => commands::zipf(&ctx, a),
        Command::Daily(a) => commands::daily(&ctx, a),
    }
}

/// 1 for usage errors, including invalid parameter values caught by the
/// library; 2 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match e.downcast_ref::<lexdiv::Error>() {
        Some(lexdiv::Error::InvalidArgument(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
