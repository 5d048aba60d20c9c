use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Hyperparams;
use crate::corpus::{NamedStimulus, StimulusBounds, StimulusSet};
use crate::error::{Error, Result};
use crate::math::{sample_dirichlet, sample_index};

/// Generating parameters: category weights, per-category feature-type
/// weights and per-type word weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueParams {
    pub theta: Vec<f64>,
    pub mu: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
}

impl TrueParams {
    /// Sharply peaked, well-separated parameters: feature type `g` puts
    /// `peak` of its mass uniformly on words `[g*block, (g+1)*block)`, and each
    /// category puts `peak` of its mass on `types_per_category` distinct
    /// feature types. The leftover mass is spread uniformly.
    pub fn planted_blocks(
        k: usize,
        g: usize,
        n_features: usize,
        block: usize,
        types_per_category: usize,
        peak: f64,
    ) -> Result<Self> {
        if k == 0 || g == 0 || block == 0 || g * block > n_features {
            return Err(Error::InvalidParameter(format!(
                "{g} blocks of {block} words do not fit in a vocabulary of {n_features}"
            )));
        }
        if types_per_category == 0 || types_per_category > g || !(0.0..=1.0).contains(&peak) {
            return Err(Error::InvalidParameter(format!(
                "invalid planted structure: {types_per_category} types of {g}, peak {peak}"
            )));
        }
        let spread = |hot: &[usize], dim: usize| -> Vec<f64> {
            let cold = dim - hot.len();
            let (hot_p, cold_p) = if cold == 0 {
                (1.0 / dim as f64, 0.0)
            } else {
                (peak / hot.len() as f64, (1.0 - peak) / cold as f64)
            };
            let mut row = vec![cold_p; dim];
            for &h in hot {
                row[h] = hot_p;
            }
            row
        };
        let phi = (0..g)
            .map(|i| {
                spread(
                    &(i * block..(i + 1) * block).collect::<Vec<_>>(),
                    n_features,
                )
            })
            .collect();
        let mu = (0..k)
            .map(|j| spread(&planted_types(j, g, types_per_category), g))
            .collect();
        Ok(TrueParams {
            theta: vec![1.0 / k as f64; k],
            mu,
            phi,
        })
    }
}

/// Feature types of planted category `j`: consecutive runs while they fit,
/// then strided sets so later categories still differ from earlier ones.
fn planted_types(j: usize, g: usize, m: usize) -> Vec<usize> {
    let base = (j * m) % g;
    let stride = 1 + (j * m) / g;
    let mut out: Vec<usize> = Vec::with_capacity(m);
    let mut next = base;
    while out.len() < m {
        if !out.contains(&next) {
            out.push(next);
            next = (next + stride) % g;
        } else {
            next = (next + 1) % g;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticConfig {
    pub n_concepts: usize,
    pub n_stimuli: usize,
    /// Context words per stimulus.
    pub stimulus_len: usize,
    pub n_features: usize,
    pub seed: u64,
    /// Permit stimulus lengths outside the usual 3..=20 window.
    pub allow_any_length: bool,
}

/// The latent structure behind a generated stimulus set, addressed by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    /// Generator concept names, `c0..c{L-1}`.
    pub concept_names: Vec<String>,
    /// Generator feature names, `w0..w{V-1}`.
    pub feature_names: Vec<String>,
    /// Category of each generator concept.
    pub true_k: Vec<usize>,
    /// Feature type of each emitted stimulus, in stimulus order.
    pub true_g: Vec<usize>,
    pub params: TrueParams,
}

impl SyntheticTruth {
    /// `concept -> "k{category}"`, for use as a gold standard.
    pub fn gold(&self) -> BTreeMap<String, String> {
        self.concept_names
            .iter()
            .zip(&self.true_k)
            .map(|(c, k)| (c.clone(), format!("k{k}")))
            .collect()
    }
}

/// Forward simulation from parameters drawn from the priors.
pub fn generate_synthetic(
    hyper: &Hyperparams,
    config: &SyntheticConfig,
) -> Result<(StimulusSet, SyntheticTruth)> {
    hyper.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // θ first, then every concept's category, then μ and φ: the prior draws are
    // independent so this order matches the generative story.
    let theta = sample_dirichlet(&mut rng, &vec![hyper.alpha; hyper.k]);
    let true_k: Vec<usize> = (0..config.n_concepts)
        .map(|_| sample_index(&mut rng, &theta))
        .collect();
    let mu = (0..hyper.k)
        .map(|_| sample_dirichlet(&mut rng, &vec![hyper.beta; hyper.g]))
        .collect();
    let phi = (0..hyper.g)
        .map(|_| sample_dirichlet(&mut rng, &vec![hyper.gamma; config.n_features]))
        .collect();
    let params = TrueParams { theta, mu, phi };
    emit(params, true_k, config, &mut rng)
}

/// Forward simulation from fixed parameters. Concept categories are still
/// drawn from `params.theta`.
pub fn generate_from_params(
    params: &TrueParams,
    config: &SyntheticConfig,
) -> Result<(StimulusSet, SyntheticTruth)> {
    let k = params.theta.len();
    if k == 0 || params.mu.len() != k || params.phi.is_empty() {
        return Err(Error::InvalidParameter(
            "inconsistent parameter dimensions".into(),
        ));
    }
    let g = params.phi.len();
    if params.mu.iter().any(|r| r.len() != g)
        || params.phi.iter().any(|r| r.len() != config.n_features)
    {
        return Err(Error::InvalidParameter(
            "inconsistent parameter dimensions".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let true_k: Vec<usize> = (0..config.n_concepts)
        .map(|_| sample_index(&mut rng, &params.theta))
        .collect();
    emit(params.clone(), true_k, config, &mut rng)
}

fn emit(
    params: TrueParams,
    true_k: Vec<usize>,
    config: &SyntheticConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(StimulusSet, SyntheticTruth)> {
    let SyntheticConfig {
        n_concepts,
        n_stimuli,
        stimulus_len,
        n_features,
        ..
    } = *config;
    if n_concepts == 0 || n_stimuli == 0 || stimulus_len == 0 || n_features == 0 {
        return Err(Error::InvalidParameter(
            "synthetic sizes must all be at least 1".into(),
        ));
    }
    let defaults = StimulusBounds::default();
    if !config.allow_any_length && !(defaults.min_ctx..=defaults.max_ctx).contains(&stimulus_len) {
        return Err(Error::InvalidParameter(format!(
            "stimulus length {stimulus_len} outside {}..={}; set the override flag to allow it",
            defaults.min_ctx, defaults.max_ctx
        )));
    }
    let concept_names: Vec<String> = (0..n_concepts).map(|l| format!("c{l}")).collect();
    let feature_names: Vec<String> = (0..n_features).map(|v| format!("w{v}")).collect();

    let mut true_g = Vec::with_capacity(n_stimuli);
    let mut records = Vec::with_capacity(n_stimuli);
    for _ in 0..n_stimuli {
        let c = rng.random_range(0..n_concepts);
        let g = sample_index(rng, &params.mu[true_k[c]]);
        let row = &params.phi[g];
        let features = (0..stimulus_len)
            .map(|_| feature_names[sample_index(rng, row)].clone())
            .collect();
        true_g.push(g);
        records.push(NamedStimulus {
            concept: concept_names[c].clone(),
            features,
            source: None,
        });
    }
    let bounds = if config.allow_any_length {
        StimulusBounds {
            min_ctx: 1,
            max_ctx: usize::MAX,
            ..defaults
        }
    } else {
        defaults
    };
    let set = StimulusSet::from_named(records, bounds)?;
    Ok((
        set,
        SyntheticTruth {
            concept_names,
            feature_names,
            true_k,
            true_g,
            params,
        },
    ))
}
