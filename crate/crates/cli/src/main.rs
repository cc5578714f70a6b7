//! `laylens` command-line tool.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "laylens", version, about = "Document layout analysis: generate, segment, classify, evaluate")]
struct Cli {
    /// Worker threads for document-level parallelism (0 = all cores).
    #[arg(long, global = true, env = "LAYLENS_JOBS", default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic annotated corpus.
    Gen(GenArgs),
    /// Segment page images into foreground blocks.
    Docstrum(DocstrumArgs),
    /// Train a region classifier on a manifest's training split.
    Train(TrainArgs),
    /// Label detections with a trained classifier.
    Classify(ClassifyArgs),
    /// Score detections against a manifest's test split.
    Eval(EvalArgs),
    /// Run the few-shot learning-curve protocol end to end.
    Protocol(ProtocolArgs),
    /// Validate and normalize an external detection file.
    Ingest(IngestArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// JSON config file (generator settings).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_docs: Option<usize>,
    #[arg(long)]
    pub test_size: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DocstrumArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory of PGM images, or a manifest file.
    #[arg(long)]
    pub images: Option<String>,
    /// Docstrum parameter file (JSON).
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Manifest split to segment: train, test or all.
    #[arg(long)]
    pub split: Option<String>,
    /// Output detection file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<String>,
    /// Train on the first k documents of the seeded training-pool shuffle.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub max_vocab: Option<usize>,
    #[arg(long)]
    pub min_df: Option<usize>,
    /// Token counts instead of presence.
    #[arg(long)]
    pub counts: bool,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// gt, docstrum or file:<path>.
    #[arg(long)]
    pub detections: Option<String>,
    /// Transcript file mapping "doc_id#index" to text.
    #[arg(long)]
    pub transcripts: Option<String>,
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Output detection file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<String>,
    /// Detection file.
    #[arg(long)]
    pub detections: Option<String>,
    /// foreground, end2end or classifier_only.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub iou: Option<f64>,
    /// k value to print in the report row.
    #[arg(long)]
    pub k: Option<usize>,
    /// Report path; .txt, .csv and .json siblings are written.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Generate the corpus from this preset.
    #[arg(long)]
    pub preset: Option<String>,
    /// Use an existing manifest instead of generating.
    #[arg(long)]
    pub manifest: Option<String>,
    /// gt, docstrum or file:<path>.
    #[arg(long)]
    pub detections: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub k_list: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub iou: Option<f64>,
    #[arg(long)]
    pub transcripts: Option<String>,
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Skip the Docstrum baseline row.
    #[arg(long)]
    pub no_baseline: bool,
    /// Output directory for reports, models and the corpus.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub detections: PathBuf,
    /// Write the normalized detection file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(3);
        }
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        pool.install(|| match cli.command {
            Command::Gen(a) => commands::gen(a),
            Command::Docstrum(a) => commands::docstrum(a),
            Command::Train(a) => commands::train(a),
            Command::Classify(a) => commands::classify(a),
            Command::Eval(a) => commands::eval(a),
            Command::Protocol(a) => commands::protocol(a),
            Command::Ingest(a) => commands::ingest(a),
        })
    }));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(3)
        }
    }
}
