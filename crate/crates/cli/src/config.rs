//! Flat TOML run configuration. Every key is optional; command-line flags
//! take precedence over the file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,

    // ingest
    pub documents: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub keep_fraction: Option<f64>,
    pub min_ctx: Option<usize>,
    pub max_ctx: Option<usize>,
    pub max_per_concept: Option<usize>,

    // synth
    pub generator: Option<String>,
    pub concepts: Option<usize>,
    pub n_stimuli: Option<usize>,
    pub stimulus_len: Option<usize>,
    pub n_features: Option<usize>,
    pub block: Option<usize>,
    pub types_per_category: Option<usize>,
    pub peak: Option<f64>,
    pub allow_any_length: Option<bool>,

    // train
    pub model: Option<String>,
    pub stimuli: Option<PathBuf>,
    pub test_size: Option<usize>,
    pub k: Option<usize>,
    pub g: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub sweeps: Option<u64>,
    pub chains: Option<usize>,
    pub early_stop: Option<bool>,
    pub window: Option<u64>,
    pub tolerance: Option<f64>,
    pub checkpoint_every: Option<u64>,
    pub resume: Option<bool>,
    pub min_count: Option<u32>,

    // eval / predict / tasks / score
    pub gold: Option<PathBuf>,
    pub pred: Option<Vec<String>>,
    pub model_dir: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub top_n: Option<usize>,
    pub types_shown: Option<usize>,
    pub words_per_type: Option<usize>,
    pub tasks: Option<PathBuf>,
    pub key: Option<PathBuf>,
    pub responses: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flag value, else config value, else nothing.
pub fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

/// Flag value, else config value, else an error naming both.
pub fn require<T: Clone>(flag: &Option<T>, file: &Option<T>, name: &str) -> Result<T> {
    match pick(flag, file) {
        Some(v) => Ok(v),
        None => bail!(
            "missing --{} (or `{}` in the config file)",
            name.replace('_', "-"),
            name
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_and_unknown_keys_fail() {
        let cfg: FileConfig = toml::from_str("seed = 3\nk = 5\npred = [\"a=b.tsv\"]\n").unwrap();
        assert_eq!(pick(&Some(9), &cfg.seed), Some(9));
        assert_eq!(pick(&None, &cfg.k), Some(5));
        assert_eq!(cfg.pred.as_deref(), Some(&["a=b.tsv".to_string()][..]));
        assert!(toml::from_str::<FileConfig>("sede = 3\n").is_err());
        let err = require::<u64>(&None, &None, "test_size")
            .unwrap_err()
            .to_string();
        assert!(err.contains("--test-size"), "{err}");
    }
}
