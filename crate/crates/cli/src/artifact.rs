//! `model.json`: everything `predict` and `tasks` need from a trained model.

use std::path::Path;

use anyhow::{bail, Context, Result};
use bcf_core::baselines::{AssocMatrix, BayesCatModel};
use bcf_core::sampler::PosteriorSummary;
use bcf_core::Vocabulary;
use serde::{Deserialize, Serialize};

pub const MODEL_FILE: &str = "model.json";
const FORMAT: &str = "bcf-model";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Bcf { summary: PosteriorSummary },
    Bayescat { model: BayesCatModel },
    Cooc { min_count: u32, values: Vec<f64> },
    Random,
}

impl ModelParams {
    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::Bcf { .. } => "bcf",
            ModelParams::Bayescat { .. } => "bayescat",
            ModelParams::Cooc { .. } => "cooc",
            ModelParams::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format: String,
    pub version: u32,
    pub vocab_digest: String,
    pub concepts: Vec<String>,
    pub features: Vec<String>,
    /// Category of each concept.
    pub categories: Vec<usize>,
    pub n_categories: usize,
    /// Words of each feature type, best first; empty for unused types.
    pub type_words: Vec<Vec<String>>,
    /// `relevance[category][type]`.
    pub relevance: Vec<Vec<f64>>,
    pub params: ModelParams,
}

impl ModelArtifact {
    pub fn new(
        vocab: &Vocabulary,
        categories: Vec<usize>,
        n_categories: usize,
        type_words: Vec<Vec<String>>,
        relevance: Vec<Vec<f64>>,
        params: ModelParams,
    ) -> Self {
        ModelArtifact {
            format: FORMAT.into(),
            version: VERSION,
            vocab_digest: vocab.digest(),
            concepts: vocab.concept_names().to_vec(),
            features: vocab.feature_names().to_vec(),
            categories,
            n_categories,
            type_words,
            relevance,
            params,
        }
    }

    pub fn vocabulary(&self) -> Result<Vocabulary> {
        Ok(Vocabulary::from_names(
            self.concepts.clone(),
            self.features.clone(),
        )?)
    }

    pub fn assoc(&self) -> Option<AssocMatrix> {
        match &self.params {
            ModelParams::Cooc { min_count, values } => Some(AssocMatrix::from_dense(
                self.concepts.len(),
                self.features.len(),
                values.clone(),
                *min_count,
            )),
            _ => None,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        bcf_core::fsutil::write_string_atomic(path, &(json + "\n"))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let artifact: ModelArtifact =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if artifact.format != FORMAT || artifact.version != VERSION {
            bail!(
                "{}: unsupported model file {} v{} (expected {FORMAT} v{VERSION})",
                path.display(),
                artifact.format,
                artifact.version
            );
        }
        let vocab = artifact.vocabulary()?;
        if vocab.digest() != artifact.vocab_digest {
            bail!(
                "{}: vocabulary digest does not match its word lists",
                path.display()
            );
        }
        if artifact.categories.len() != artifact.concepts.len() {
            bail!("{}: one category per concept expected", path.display());
        }
        if let ModelParams::Cooc { values, .. } = &artifact.params {
            if values.len() != artifact.concepts.len() * artifact.features.len() {
                bail!("{}: association matrix has the wrong size", path.display());
            }
        }
        Ok(artifact)
    }
}
