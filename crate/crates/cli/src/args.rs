use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "bcf",
    version,
    about = "Learn concept categories and feature types from text stimuli"
)]
pub struct Cli {
    /// Flat TOML file with default values for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for chains and prediction (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract stimuli from tokenized documents.
    Ingest(IngestArgs),
    /// Generate a synthetic stimulus set with known structure.
    Synth(SynthArgs),
    /// Train a model (bcf, bayescat, cooc or random).
    Train(TrainArgs),
    /// Score categorizations against a gold standard.
    Eval(EvalArgs),
    /// Rank concepts for held-out stimuli.
    Predict(PredictArgs),
    /// Generate intrusion tasks from a trained model.
    Tasks(TasksArgs),
    /// Score intrusion task responses.
    Score(ScoreArgs),
}

#[derive(Debug, Args, Default)]
pub struct IngestArgs {
    /// A directory of `.txt` files (one sentence per line) or a JSONL file.
    #[arg(long)]
    pub documents: Option<PathBuf>,
    /// One concept surface form per line.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub keep_fraction: Option<f64>,
    #[arg(long)]
    pub min_ctx: Option<usize>,
    #[arg(long)]
    pub max_ctx: Option<usize>,
    #[arg(long)]
    pub max_per_concept: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct SynthArgs {
    /// `prior` draws parameters from the Dirichlet priors; `planted` uses
    /// disjoint word blocks per feature type.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub concepts: Option<usize>,
    #[arg(long)]
    pub n_stimuli: Option<usize>,
    #[arg(long)]
    pub stimulus_len: Option<usize>,
    #[arg(long)]
    pub n_features: Option<usize>,
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long)]
    pub types_per_category: Option<usize>,
    #[arg(long)]
    pub peak: Option<f64>,
    /// Permit stimulus lengths outside 3..=20.
    #[arg(long)]
    pub allow_any_length: bool,
}

#[derive(Debug, Args, Default)]
pub struct TrainArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub stimuli: Option<PathBuf>,
    /// Stimuli held out for prediction before training.
    #[arg(long)]
    pub test_size: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub sweeps: Option<u64>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub early_stop: bool,
    #[arg(long)]
    pub window: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Write chain checkpoints every this many sweeps.
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    /// Continue chains from checkpoints in the output directory.
    #[arg(long)]
    pub resume: bool,
    /// Co-occurrence cutoff for the cooc baseline.
    #[arg(long)]
    pub min_count: Option<u32>,
    /// Feature types per category for the cooc baseline.
    #[arg(long)]
    pub types_per_category: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct EvalArgs {
    /// Gold standard TSV (`concept`, `label`).
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// `NAME=PATH` or `PATH` of a categorization TSV or a model directory.
    #[arg(long)]
    pub pred: Vec<String>,
}

#[derive(Debug, Args, Default)]
pub struct PredictArgs {
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    /// Held-out stimuli (default: `test.jsonl` in the model directory).
    #[arg(long)]
    pub test: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct TasksArgs {
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    /// Words shown per coherence task, intruder excluded.
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Rows per relevance task, intruder included.
    #[arg(long)]
    pub types_shown: Option<usize>,
    #[arg(long)]
    pub words_per_type: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct ScoreArgs {
    #[arg(long)]
    pub tasks: Option<PathBuf>,
    #[arg(long)]
    pub key: Option<PathBuf>,
    #[arg(long)]
    pub responses: Option<PathBuf>,
}
