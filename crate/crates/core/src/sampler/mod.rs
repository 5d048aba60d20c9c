//! The joint category / feature-type model.
//!
//! Each concept type carries one category; each stimulus carries one feature
//! type drawn from its concept's category, and every context word of the
//! stimulus is drawn from that feature type's word distribution. All
//! Dirichlet-distributed parameters are integrated out, so the sampler state
//! is just the two assignment vectors plus the count tables they induce.

mod chain;
mod checkpoint;
mod posterior;
mod state;
mod synthetic;

use serde::{Deserialize, Serialize};

use crate::corpus::StimulusSet;
use crate::error::{Error, Result};

pub use chain::{
    chain_seeds, run_chain, run_chains, BestSnapshot, ChainConfig, ChainRun, TracePoint,
};
pub use checkpoint::{read_trace, write_trace, Checkpoint, CHECKPOINT_VERSION};
pub use posterior::{category_members, top_feature_types, top_features, PosteriorSummary};
pub use state::{CountTables, ModelState, Site};
pub use synthetic::{
    generate_from_params, generate_synthetic, SyntheticConfig, SyntheticTruth, TrueParams,
};

/// Sizes and symmetric Dirichlet concentrations.
///
/// `alpha` smooths the category distribution, `beta` each category's
/// distribution over feature types and `gamma` each feature type's
/// distribution over words.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub k: usize,
    pub g: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Hyperparams {
    /// Concentrations default to 0.7 / 0.1 / 0.1.
    pub fn new(k: usize, g: usize) -> Self {
        Hyperparams {
            k,
            g,
            alpha: 0.7,
            beta: 0.1,
            gamma: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.g == 0 {
            return Err(Error::InvalidParameter(format!(
                "K and G must be at least 1 (got K={}, G={})",
                self.k, self.g
            )));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams::new(40, 50)
    }
}

/// Stimuli laid out for the sampler's inner loop.
///
/// Each stimulus' context words are stored as sorted `(feature, multiplicity)`
/// pairs in one flat buffer.
#[derive(Debug, Clone)]
pub struct Observations {
    n_concepts: usize,
    n_features: usize,
    concept_of: Vec<usize>,
    lengths: Vec<u32>,
    offsets: Vec<usize>,
    token_feature: Vec<usize>,
    token_count: Vec<u32>,
    by_concept: Vec<Vec<usize>>,
}

impl Observations {
    /// `stimuli` are `(concept, features)` pairs; ids must be in range.
    pub fn new(
        n_concepts: usize,
        n_features: usize,
        stimuli: &[(usize, Vec<usize>)],
    ) -> Result<Self> {
        let mut obs = Observations {
            n_concepts,
            n_features,
            concept_of: Vec::with_capacity(stimuli.len()),
            lengths: Vec::with_capacity(stimuli.len()),
            offsets: vec![0],
            token_feature: Vec::new(),
            token_count: Vec::new(),
            by_concept: vec![Vec::new(); n_concepts],
        };
        for (d, (concept, features)) in stimuli.iter().enumerate() {
            if *concept >= n_concepts {
                return Err(Error::OutOfRange {
                    what: "concept",
                    id: *concept,
                    size: n_concepts,
                });
            }
            let mut sorted = features.clone();
            sorted.sort_unstable();
            if let Some(&bad) = sorted.last().filter(|&&f| f >= n_features) {
                return Err(Error::OutOfRange {
                    what: "feature",
                    id: bad,
                    size: n_features,
                });
            }
            for chunk in sorted.chunk_by(|a, b| a == b) {
                obs.token_feature.push(chunk[0]);
                obs.token_count.push(chunk.len() as u32);
            }
            obs.offsets.push(obs.token_feature.len());
            obs.concept_of.push(*concept);
            obs.lengths.push(features.len() as u32);
            obs.by_concept[*concept].push(d);
        }
        Ok(obs)
    }

    pub fn from_set(set: &StimulusSet) -> Self {
        let pairs: Vec<(usize, Vec<usize>)> = set
            .stimuli()
            .iter()
            .map(|s| (s.concept, s.features.clone()))
            .collect();
        Observations::new(set.vocab().n_concepts(), set.vocab().n_features(), &pairs)
            .expect("a StimulusSet only holds in-range ids")
    }

    pub fn n_stimuli(&self) -> usize {
        self.concept_of.len()
    }

    pub fn n_concepts(&self) -> usize {
        self.n_concepts
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn concept_of(&self, d: usize) -> usize {
        self.concept_of[d]
    }

    /// Number of context words in stimulus `d`.
    pub fn len_of(&self, d: usize) -> u32 {
        self.lengths[d]
    }

    /// Distinct features of stimulus `d` with their multiplicities.
    pub fn tokens(&self, d: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let range = self.offsets[d]..self.offsets[d + 1];
        self.token_feature[range.clone()]
            .iter()
            .copied()
            .zip(self.token_count[range].iter().copied())
    }

    /// Stimulus indices of concept `l`, ascending.
    pub fn stimuli_of(&self, l: usize) -> &[usize] {
        &self.by_concept[l]
    }
}
