//! `ncage`: generate graphs, compute exact centralities, train rank
//! predictors, and evaluate or benchmark them.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "ncage", version, about = "Centrality rank approximation with graph embeddings")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, env = "NCAGE_CONFIG")]
    pub config: Option<PathBuf>,

    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Only print warnings and errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Write synthetic graphs as edge lists plus a manifest.
    Generate(GenerateArgs),
    /// Exact centrality values and normalized ranks for one graph.
    Centrality(CentralityArgs),
    /// Train a model and write a checkpoint.
    Train(TrainArgs),
    /// Predicted ranks for every node of a graph.
    Predict(PredictArgs),
    /// Kendall tau-b of a checkpoint on synthetic test sets.
    Evaluate(EvaluateArgs),
    /// Time feature preparation plus inference.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// sf, sw, rnd or mix.
    #[arg(long)]
    pub topology: String,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 100)]
    pub min_n: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "graphs")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// degree, eigenvector, closeness, harmonic or betweenness.
    #[arg(long)]
    pub kind: String,
    /// Reduce the graph to its largest connected component first.
    #[arg(long)]
    pub largest_component: bool,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct TrainArgs {
    /// gcn, s2v or baseline.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub centrality: Option<String>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub embed_dim: Option<usize>,
    #[arg(long)]
    pub n_graphs: Option<usize>,
    #[arg(long)]
    pub min_nodes: Option<usize>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub sf_m: Option<usize>,
    /// Node-steps to train for.
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub lr_decay: Option<f64>,
    #[arg(long)]
    pub min_lr: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub clip: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub data_seed: Option<u64>,
    /// f32 or f64.
    #[arg(long)]
    pub precision: Option<String>,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub checkpoint_interval: Option<u64>,
    #[arg(long)]
    pub log_interval: Option<u64>,
    #[arg(long)]
    pub eigen_tol: Option<f64>,
    #[arg(long)]
    pub eigen_max_iter: Option<usize>,
    /// Continue from this checkpoint; `--steps` then sets the new total.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Stop at the first batch boundary at or past this step, leaving a
    /// checkpoint that `--resume` continues to `--steps`.
    #[arg(long)]
    pub stop_after: Option<u64>,
    /// Write the per-batch loss trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    /// Centrality the ranks are wanted for; defaults to the trained one.
    #[arg(long)]
    pub centrality: Option<String>,
    #[arg(long)]
    pub allow_kind_mismatch: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub centrality: Option<String>,
    /// Comma-separated subset of sw,sf,rnd,mix.
    #[arg(long, value_delimiter = ',')]
    pub sets: Option<Vec<String>>,
    #[arg(long)]
    pub graphs_per_set: Option<usize>,
    #[arg(long)]
    pub min_nodes: Option<usize>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Evaluate on the graphs of a `generate` manifest instead.
    #[arg(long, conflicts_with = "sets")]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub allow_kind_mismatch: bool,
    /// Exit with status 3 if any set's mean tau-b falls below this.
    #[arg(long)]
    pub tau_floor: Option<f64>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Edge-list files to time; a scale-free ladder is used when absent.
    #[arg(long)]
    pub graph: Vec<PathBuf>,
    /// Edge counts of the generated scale-free ladder.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure classes mapped to exit codes 1, 2 and 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Floor(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Floor(_) => 3,
        }
    }
}

impl From<ncage_core::Error> for CliError {
    fn from(e: ncage_core::Error) -> Self {
        match e {
            ncage_core::Error::InvalidParameter(msg) => CliError::Usage(msg),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let file = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Usage)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Centrality(a) => commands::centrality(&a),
        Command::Train(a) => commands::train(&a, &file.train),
        Command::Predict(a) => commands::predict(&a),
        Command::Evaluate(a) => commands::evaluate(&a, &file.evaluate),
        Command::Bench(a) => commands::bench(&a, &file.bench),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Data(msg) | CliError::Floor(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
