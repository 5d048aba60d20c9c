mod eval;
mod ingest;
mod predict;
mod score;
mod synth;
mod tasks;
mod train;

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};

pub use eval::cmd_eval;
pub use ingest::cmd_ingest;
pub use predict::cmd_predict;
pub use score::cmd_score;
pub use synth::cmd_synth;
pub use tasks::cmd_tasks;
pub use train::cmd_train;

use crate::config::FileConfig;

pub const STIMULI_FILE: &str = "stimuli.jsonl";
pub const TRAIN_FILE: &str = "train.jsonl";
pub const TEST_FILE: &str = "test.jsonl";
pub const CATEGORIES_FILE: &str = "categories.tsv";
pub const METRICS_FILE: &str = "metrics.tsv";
pub const RANKING_FILE: &str = "ranking.tsv";
pub const RANKS_FILE: &str = "ranks.tsv";
pub const SCORE_FILE: &str = "score.tsv";

/// Options shared by every command.
#[derive(Debug, Clone)]
pub struct Global {
    pub file: FileConfig,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
}

impl Global {
    pub fn new(file: FileConfig, seed: Option<u64>, out_dir: Option<PathBuf>) -> Self {
        let seed = seed.or(file.seed);
        let out_dir = out_dir
            .or_else(|| file.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("bcf-out"));
        Global {
            file,
            seed,
            out_dir,
        }
    }

    /// Seeds are never defaulted.
    pub fn seed(&self) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None => bail!("no seed given: pass --seed or set `seed` in the config file"),
        }
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

pub(crate) fn ensure_exists(path: &Path, what: &str) -> Result<()> {
    if !path.exists() {
        bail!("{what} {} does not exist", path.display());
    }
    Ok(())
}
