//! The `bcf` command-line pipeline: ingest or synthesize stimuli, train a
//! model, evaluate it, rank concepts for held-out stimuli and build
//! intrusion tasks.

pub mod args;
pub mod artifact;
pub mod commands;
pub mod config;

use anyhow::Result;

use args::{Cli, Command};
use commands::Global;
use config::FileConfig;

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if let Some(n) = cli.threads.or(file.threads) {
        // A pool already configured in this process is kept.
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("thread pool: {e}");
        }
    }
    let global = Global::new(file, cli.seed, cli.out_dir);
    match &cli.command {
        Command::Ingest(a) => commands::cmd_ingest(&global, a),
        Command::Synth(a) => commands::cmd_synth(&global, a),
        Command::Train(a) => commands::cmd_train(&global, a),
        Command::Eval(a) => commands::cmd_eval(&global, a),
        Command::Predict(a) => commands::cmd_predict(&global, a),
        Command::Tasks(a) => commands::cmd_tasks(&global, a),
        Command::Score(a) => commands::cmd_score(&global, a),
    }
}
