//! A BayesCat-style baseline: a Dirichlet mixture in which every stimulus
//! draws one category `z`, then emits its concept from `p(c|z)` and each of
//! its context words from `p(f|z)`. Inference is collapsed Gibbs sampling
//! over the per-stimulus categories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{kmeans, FeatureTypeClustering};
use crate::categorization::Categorization;
use crate::error::{Error, Result};
use crate::math::{argmax, ln_gamma, ln_rising, normalize_log_weights, sample_index};
use crate::sampler::Observations;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesCatParams {
    pub k: usize,
    /// Smoothing of `p(z)`.
    pub alpha: f64,
    /// Smoothing of `p(c|z)`.
    pub beta: f64,
    /// Smoothing of `p(f|z)`.
    pub gamma: f64,
}

impl BayesCatParams {
    pub fn new(k: usize) -> Self {
        BayesCatParams {
            k,
            alpha: 0.7,
            beta: 0.1,
            gamma: 0.1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("K must be at least 1".into()));
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

/// Point estimates of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesCatModel {
    pub p_z: Vec<f64>,
    /// K rows over concepts.
    pub p_c_given_z: Vec<Vec<f64>>,
    /// K rows over features.
    pub p_f_given_z: Vec<Vec<f64>>,
}

impl BayesCatModel {
    pub fn n_categories(&self) -> usize {
        self.p_z.len()
    }
}

#[derive(Debug, Clone)]
pub struct BayesCatState {
    params: BayesCatParams,
    n_concepts: usize,
    n_features: usize,
    z: Vec<usize>,
    /// Stimuli per category.
    n_z: Vec<u32>,
    /// K x L.
    n_zc: Vec<u32>,
    /// K x V.
    n_zf: Vec<u32>,
    /// Tokens per category.
    n_z_tokens: Vec<u32>,
    detached: Option<usize>,
    rng: ChaCha8Rng,
    scratch: Vec<f64>,
}

impl BayesCatState {
    pub fn init(obs: &Observations, params: BayesCatParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = (0..obs.n_stimuli())
            .map(|_| rng.random_range(0..params.k))
            .collect();
        let mut state = Self::from_assignments(obs, params, z)?;
        state.rng = rng;
        Ok(state)
    }

    pub fn from_assignments(
        obs: &Observations,
        params: BayesCatParams,
        z: Vec<usize>,
    ) -> Result<Self> {
        params.validate()?;
        if z.len() != obs.n_stimuli() {
            return Err(Error::InvalidParameter(
                "one category per stimulus required".into(),
            ));
        }
        if let Some(&bad) = z.iter().find(|&&k| k >= params.k) {
            return Err(Error::OutOfRange {
                what: "category",
                id: bad,
                size: params.k,
            });
        }
        let (k, l, v) = (params.k, obs.n_concepts(), obs.n_features());
        let mut state = BayesCatState {
            params,
            n_concepts: l,
            n_features: v,
            z: vec![0; obs.n_stimuli()],
            n_z: vec![0; k],
            n_zc: vec![0; k * l],
            n_zf: vec![0; k * v],
            n_z_tokens: vec![0; k],
            detached: None,
            rng: ChaCha8Rng::seed_from_u64(0),
            scratch: vec![0.0; k],
        };
        for (d, &zd) in z.iter().enumerate() {
            state.detached = Some(d);
            state.attach(obs, d, zd)?;
        }
        Ok(state)
    }

    pub fn assignments(&self) -> &[usize] {
        &self.z
    }

    pub fn detach(&mut self, obs: &Observations, d: usize) -> Result<()> {
        if d >= obs.n_stimuli() {
            return Err(Error::OutOfRange {
                what: "stimulus",
                id: d,
                size: obs.n_stimuli(),
            });
        }
        if self.detached.is_some() {
            return Err(Error::InvalidParameter(
                "another stimulus is detached".into(),
            ));
        }
        let z = self.z[d];
        let (l, v) = (self.n_concepts, self.n_features);
        let sub = |x: &mut u32, by: u32| -> Result<()> {
            *x = x
                .checked_sub(by)
                .ok_or(Error::CountUnderflow("bayescat counts"))?;
            Ok(())
        };
        sub(&mut self.n_z[z], 1)?;
        sub(&mut self.n_zc[z * l + obs.concept_of(d)], 1)?;
        for (f, m) in obs.tokens(d) {
            sub(&mut self.n_zf[z * v + f], m)?;
        }
        sub(&mut self.n_z_tokens[z], obs.len_of(d))?;
        self.detached = Some(d);
        Ok(())
    }

    pub fn attach(&mut self, obs: &Observations, d: usize, z: usize) -> Result<()> {
        if self.detached != Some(d) {
            return Err(Error::SiteNotDetached(format!("stimulus {d}")));
        }
        let (l, v) = (self.n_concepts, self.n_features);
        self.n_z[z] += 1;
        self.n_zc[z * l + obs.concept_of(d)] += 1;
        for (f, m) in obs.tokens(d) {
            self.n_zf[z * v + f] += m;
        }
        self.n_z_tokens[z] += obs.len_of(d);
        self.z[d] = z;
        self.detached = None;
        Ok(())
    }

    /// Log unnormalized conditional of stimulus `d`'s category; `d` must be
    /// detached.
    pub fn log_conditional(&self, obs: &Observations, d: usize) -> Result<Vec<f64>> {
        if self.detached != Some(d) {
            return Err(Error::SiteNotDetached(format!("stimulus {d}")));
        }
        let BayesCatParams {
            k,
            alpha,
            beta,
            gamma,
        } = self.params;
        let (l, v) = (self.n_concepts, self.n_features);
        let c = obs.concept_of(d);
        let len = obs.len_of(d);
        Ok((0..k)
            .map(|z| {
                let nz = f64::from(self.n_z[z]);
                let mut lw = (nz + alpha).ln() + (f64::from(self.n_zc[z * l + c]) + beta).ln()
                    - (nz + l as f64 * beta).ln();
                for (f, m) in obs.tokens(d) {
                    lw += ln_rising(f64::from(self.n_zf[z * v + f]) + gamma, m);
                }
                lw - ln_rising(f64::from(self.n_z_tokens[z]) + v as f64 * gamma, len)
            })
            .collect())
    }

    pub fn sweep(&mut self, obs: &Observations) -> Result<()> {
        for d in 0..obs.n_stimuli() {
            self.detach(obs, d)?;
            let mut w = self.log_conditional(obs, d)?;
            normalize_log_weights(&mut w);
            let z = sample_index(&mut self.rng, &w);
            self.scratch = w;
            self.attach(obs, d, z)?;
        }
        Ok(())
    }

    /// Log of the collapsed joint `p(z, c, f)`.
    pub fn log_joint(&self) -> f64 {
        let BayesCatParams {
            k,
            alpha,
            beta,
            gamma,
        } = self.params;
        let (l, v) = (self.n_concepts, self.n_features);
        let dm = |counts: &[u32], conc: f64| -> f64 {
            let dim = counts.len() as f64;
            let total: f64 = counts.iter().map(|&n| f64::from(n)).sum();
            ln_gamma(dim * conc) - ln_gamma(total + dim * conc)
                + counts
                    .iter()
                    .filter(|&&n| n > 0)
                    .map(|&n| ln_gamma(f64::from(n) + conc) - ln_gamma(conc))
                    .sum::<f64>()
        };
        let mut lp = dm(&self.n_z, alpha);
        for z in 0..k {
            lp += dm(&self.n_zc[z * l..(z + 1) * l], beta);
            lp += dm(&self.n_zf[z * v..(z + 1) * v], gamma);
        }
        lp
    }

    pub fn model(&self) -> BayesCatModel {
        let BayesCatParams {
            alpha, beta, gamma, ..
        } = self.params;
        let (l, v) = (self.n_concepts, self.n_features);
        let smooth = |row: &[u32], conc: f64| -> Vec<f64> {
            let total = row.iter().map(|&n| f64::from(n)).sum::<f64>() + row.len() as f64 * conc;
            row.iter().map(|&n| (f64::from(n) + conc) / total).collect()
        };
        BayesCatModel {
            p_z: smooth(&self.n_z, alpha),
            p_c_given_z: self
                .n_zc
                .chunks(l.max(1))
                .take(self.params.k)
                .map(|r| smooth(r, beta))
                .collect(),
            p_f_given_z: self
                .n_zf
                .chunks(v.max(1))
                .take(self.params.k)
                .map(|r| smooth(r, gamma))
                .collect(),
        }
    }
}

/// Trains for `sweeps` sweeps and returns the estimates of the
/// highest-joint state visited (the initial state included), with its log
/// joint.
pub fn bayescat_train(
    obs: &Observations,
    params: BayesCatParams,
    seed: u64,
    sweeps: u64,
) -> Result<(BayesCatModel, f64)> {
    let mut state = BayesCatState::init(obs, params, seed)?;
    let mut best = (state.log_joint(), state.model());
    for _ in 0..sweeps {
        state.sweep(obs)?;
        let lj = state.log_joint();
        if lj > best.0 {
            best = (lj, state.model());
        }
    }
    Ok((best.1, best.0))
}

/// Clusters features by `p(z|f) ∝ p(f|z) p(z)` into `g` global types and
/// weights each category's association with a type by `Σ_{f∈g} p(f|z)`.
pub fn bayescat_feature_types(
    model: &BayesCatModel,
    g: usize,
    seed: u64,
) -> Result<FeatureTypeClustering> {
    let k = model.n_categories();
    let v = model.p_f_given_z.first().map_or(0, Vec::len);
    if g > v {
        return Err(Error::TooManyClusters { k: g, n: v });
    }
    let vectors: Vec<Vec<f64>> = (0..v)
        .map(|f| {
            let mut col: Vec<f64> = (0..k)
                .map(|z| model.p_f_given_z[z][f] * model.p_z[z])
                .collect();
            let total: f64 = col.iter().sum();
            col.iter_mut().for_each(|x| *x /= total);
            col
        })
        .collect();
    let result = kmeans(&vectors, g, seed, 100)?;
    let mut relevance = vec![vec![0.0; g]; k];
    for (f, &t) in result.assignment.iter().enumerate() {
        for (row, p_f) in relevance.iter_mut().zip(&model.p_f_given_z) {
            row[t] += p_f[f];
        }
    }
    Ok(FeatureTypeClustering {
        assignment: result.assignment.into_iter().enumerate().collect(),
        n_types: g,
        relevance,
    })
}

/// Hard categorization `z(c) = argmax_z p(c|z) p(z|c)`; ties to the lowest z.
pub fn bayescat_hard_assign(model: &BayesCatModel) -> Result<Categorization> {
    let k = model.n_categories();
    let l = model.p_c_given_z.first().map_or(0, Vec::len);
    let labels = (0..l)
        .map(|c| {
            let joint: Vec<f64> = (0..k)
                .map(|z| model.p_c_given_z[z][c] * model.p_z[z])
                .collect();
            let norm: f64 = joint.iter().sum();
            let score: Vec<f64> = (0..k)
                .map(|z| model.p_c_given_z[z][c] * joint[z] / norm)
                .collect();
            argmax(&score)
        })
        .collect();
    Categorization::new(labels, k)
}
