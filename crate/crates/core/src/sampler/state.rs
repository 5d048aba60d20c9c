use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Hyperparams, Observations};
use crate::error::{Error, Result};
use crate::math::{ln_gamma, ln_rising, normalize_log_weights, sample_index};

/// A sampling site currently removed from the count tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Stimulus(usize),
    Concept(usize),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Stimulus(d) => write!(f, "stimulus {d}"),
            Site::Concept(l) => write!(f, "concept {l}"),
        }
    }
}

/// The sufficient statistics of an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTables {
    /// Concepts per category, length K.
    pub n_cat: Vec<u32>,
    /// Stimuli per (category, feature type), K x G row-major.
    pub n_cat_ft: Vec<u32>,
    /// Stimuli per category, length K.
    pub n_cat_total: Vec<u32>,
    /// Tokens per (feature type, feature), G x V row-major.
    pub n_ft_feat: Vec<u32>,
    /// Tokens per feature type, length G.
    pub n_ft_total: Vec<u32>,
}

impl CountTables {
    fn zeros(k: usize, g: usize, v: usize) -> Self {
        CountTables {
            n_cat: vec![0; k],
            n_cat_ft: vec![0; k * g],
            n_cat_total: vec![0; k],
            n_ft_feat: vec![0; g * v],
            n_ft_total: vec![0; g],
        }
    }

    /// Rebuilds every table from scratch.
    pub fn recount(
        obs: &Observations,
        hyper: &Hyperparams,
        g_assign: &[usize],
        k_assign: &[usize],
    ) -> Self {
        let (k, g, v) = (hyper.k, hyper.g, obs.n_features());
        let mut t = CountTables::zeros(k, g, v);
        for &j in k_assign {
            t.n_cat[j] += 1;
        }
        for (d, &i) in g_assign.iter().enumerate() {
            let j = k_assign[obs.concept_of(d)];
            t.n_cat_ft[j * g + i] += 1;
            t.n_cat_total[j] += 1;
            for (f, m) in obs.tokens(d) {
                t.n_ft_feat[i * v + f] += m;
            }
            t.n_ft_total[i] += obs.len_of(d);
        }
        t
    }
}

#[inline]
fn dec(slot: &mut u32, by: u32, what: &'static str) -> Result<()> {
    *slot = slot.checked_sub(by).ok_or(Error::CountUnderflow(what))?;
    Ok(())
}

/// Sampler state: both assignment vectors, their count tables and the RNG.
#[derive(Debug, Clone)]
pub struct ModelState {
    hyper: Hyperparams,
    n_features: usize,
    g_assign: Vec<usize>,
    k_assign: Vec<usize>,
    counts: CountTables,
    detached: Option<Site>,
    seed: u64,
    rng: ChaCha8Rng,
    sweeps: u64,
    scratch: Vec<f64>,
    type_scratch: Vec<u32>,
}

impl ModelState {
    /// Uniform random initialisation of every category and feature-type label.
    pub fn init(obs: &Observations, hyper: Hyperparams, seed: u64) -> Result<Self> {
        hyper.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k_assign: Vec<usize> = (0..obs.n_concepts())
            .map(|_| rng.random_range(0..hyper.k))
            .collect();
        let g_assign: Vec<usize> = (0..obs.n_stimuli())
            .map(|_| rng.random_range(0..hyper.g))
            .collect();
        let mut state = Self::build(obs, hyper, g_assign, k_assign, seed)?;
        state.rng = rng;
        Ok(state)
    }

    /// State from explicit assignments; the RNG starts fresh from `seed`.
    pub fn from_assignments(
        obs: &Observations,
        hyper: Hyperparams,
        g_assign: Vec<usize>,
        k_assign: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        hyper.validate()?;
        Self::build(obs, hyper, g_assign, k_assign, seed)
    }

    fn build(
        obs: &Observations,
        hyper: Hyperparams,
        g_assign: Vec<usize>,
        k_assign: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        if g_assign.len() != obs.n_stimuli() || k_assign.len() != obs.n_concepts() {
            return Err(Error::InvalidParameter(format!(
                "assignment lengths ({}, {}) do not match data ({} stimuli, {} concepts)",
                g_assign.len(),
                k_assign.len(),
                obs.n_stimuli(),
                obs.n_concepts()
            )));
        }
        if let Some(&bad) = g_assign.iter().find(|&&i| i >= hyper.g) {
            return Err(Error::OutOfRange {
                what: "feature type",
                id: bad,
                size: hyper.g,
            });
        }
        if let Some(&bad) = k_assign.iter().find(|&&j| j >= hyper.k) {
            return Err(Error::OutOfRange {
                what: "category",
                id: bad,
                size: hyper.k,
            });
        }
        let counts = CountTables::recount(obs, &hyper, &g_assign, &k_assign);
        Ok(ModelState {
            hyper,
            n_features: obs.n_features(),
            g_assign,
            k_assign,
            counts,
            detached: None,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            sweeps: 0,
            scratch: vec![0.0; hyper.g.max(hyper.k)],
            type_scratch: vec![0; hyper.g],
        })
    }

    pub fn hyper(&self) -> &Hyperparams {
        &self.hyper
    }

    pub fn g_assign(&self) -> &[usize] {
        &self.g_assign
    }

    pub fn k_assign(&self) -> &[usize] {
        &self.k_assign
    }

    pub fn counts(&self) -> &CountTables {
        &self.counts
    }

    pub fn detached(&self) -> Option<Site> {
        self.detached
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Completed sweeps since initialisation.
    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    pub(crate) fn rng_word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub(crate) fn restore_progress(&mut self, sweeps: u64, word_pos: u128) {
        self.sweeps = sweeps;
        self.rng.set_word_pos(word_pos);
    }

    /// True when the stored tables equal a from-scratch recount.
    pub fn is_consistent(&self, obs: &Observations) -> bool {
        self.detached.is_none()
            && self.counts == CountTables::recount(obs, &self.hyper, &self.g_assign, &self.k_assign)
    }

    fn require_attached(&self) -> Result<()> {
        match self.detached {
            None => Ok(()),
            Some(site) => Err(Error::InvalidParameter(format!("{site} is still detached"))),
        }
    }

    fn check_stimulus(&self, obs: &Observations, d: usize) -> Result<()> {
        if d >= obs.n_stimuli() {
            return Err(Error::OutOfRange {
                what: "stimulus",
                id: d,
                size: obs.n_stimuli(),
            });
        }
        Ok(())
    }

    fn check_concept(&self, obs: &Observations, l: usize) -> Result<()> {
        if l >= obs.n_concepts() {
            return Err(Error::OutOfRange {
                what: "concept",
                id: l,
                size: obs.n_concepts(),
            });
        }
        Ok(())
    }

    /// Removes stimulus `d`'s contributions from the tables.
    pub fn detach_stimulus(&mut self, obs: &Observations, d: usize) -> Result<()> {
        self.check_stimulus(obs, d)?;
        self.require_attached()?;
        let (g, v) = (self.hyper.g, self.n_features);
        let i = self.g_assign[d];
        let j = self.k_assign[obs.concept_of(d)];
        let c = &mut self.counts;
        dec(&mut c.n_cat_ft[j * g + i], 1, "n_cat_ft")?;
        dec(&mut c.n_cat_total[j], 1, "n_cat_total")?;
        for (f, m) in obs.tokens(d) {
            dec(&mut c.n_ft_feat[i * v + f], m, "n_ft_feat")?;
        }
        dec(&mut c.n_ft_total[i], obs.len_of(d), "n_ft_total")?;
        self.detached = Some(Site::Stimulus(d));
        Ok(())
    }

    /// Re-inserts detached stimulus `d` with feature type `i`.
    pub fn attach_stimulus(&mut self, obs: &Observations, d: usize, i: usize) -> Result<()> {
        if self.detached != Some(Site::Stimulus(d)) {
            return Err(Error::SiteNotDetached(Site::Stimulus(d).to_string()));
        }
        if i >= self.hyper.g {
            return Err(Error::OutOfRange {
                what: "feature type",
                id: i,
                size: self.hyper.g,
            });
        }
        let (g, v) = (self.hyper.g, self.n_features);
        let j = self.k_assign[obs.concept_of(d)];
        let c = &mut self.counts;
        c.n_cat_ft[j * g + i] += 1;
        c.n_cat_total[j] += 1;
        for (f, m) in obs.tokens(d) {
            c.n_ft_feat[i * v + f] += m;
        }
        c.n_ft_total[i] += obs.len_of(d);
        self.g_assign[d] = i;
        self.detached = None;
        Ok(())
    }

    /// Removes concept `l`'s category count and the category side of all of
    /// its stimuli.
    pub fn detach_concept(&mut self, obs: &Observations, l: usize) -> Result<()> {
        self.check_concept(obs, l)?;
        self.require_attached()?;
        let g = self.hyper.g;
        let j = self.k_assign[l];
        dec(&mut self.counts.n_cat[j], 1, "n_cat")?;
        for &d in obs.stimuli_of(l) {
            dec(
                &mut self.counts.n_cat_ft[j * g + self.g_assign[d]],
                1,
                "n_cat_ft",
            )?;
        }
        dec(
            &mut self.counts.n_cat_total[j],
            obs.stimuli_of(l).len() as u32,
            "n_cat_total",
        )?;
        self.detached = Some(Site::Concept(l));
        Ok(())
    }

    pub fn attach_concept(&mut self, obs: &Observations, l: usize, j: usize) -> Result<()> {
        if self.detached != Some(Site::Concept(l)) {
            return Err(Error::SiteNotDetached(Site::Concept(l).to_string()));
        }
        if j >= self.hyper.k {
            return Err(Error::OutOfRange {
                what: "category",
                id: j,
                size: self.hyper.k,
            });
        }
        let g = self.hyper.g;
        self.counts.n_cat[j] += 1;
        for &d in obs.stimuli_of(l) {
            self.counts.n_cat_ft[j * g + self.g_assign[d]] += 1;
        }
        self.counts.n_cat_total[j] += obs.stimuli_of(l).len() as u32;
        self.k_assign[l] = j;
        self.detached = None;
        Ok(())
    }

    /// Log of the unnormalized full conditional of `g^d` for every feature
    /// type, written into `out`. Stimulus `d` must be detached.
    pub fn log_conditional_g_into(
        &self,
        obs: &Observations,
        d: usize,
        out: &mut [f64],
    ) -> Result<()> {
        self.check_stimulus(obs, d)?;
        if self.detached != Some(Site::Stimulus(d)) {
            return Err(Error::SiteNotDetached(Site::Stimulus(d).to_string()));
        }
        let Hyperparams { g, beta, gamma, .. } = self.hyper;
        let v = self.n_features;
        let j = self.k_assign[obs.concept_of(d)];
        let c = &self.counts;
        let type_norm = (f64::from(c.n_cat_total[j]) + g as f64 * beta).ln();
        let len = obs.len_of(d);
        let v_gamma = v as f64 * gamma;
        for (i, slot) in out.iter_mut().enumerate().take(g) {
            let prior = (f64::from(c.n_cat_ft[j * g + i]) + beta).ln() - type_norm;
            let row = i * v;
            // Product of rising factorials, multiplied out with a rescale guard.
            let mut prod = 1.0f64;
            let mut acc = 0.0f64;
            for (f, m) in obs.tokens(d) {
                let base = f64::from(c.n_ft_feat[row + f]) + gamma;
                for a in 0..m {
                    prod *= base + f64::from(a);
                }
                if !(1e-200..=1e200).contains(&prod) {
                    acc += prod.ln();
                    prod = 1.0;
                }
            }
            acc += prod.ln();
            *slot = prior + acc - ln_rising(f64::from(c.n_ft_total[i]) + v_gamma, len);
        }
        Ok(())
    }

    pub fn log_conditional_g(&self, obs: &Observations, d: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.hyper.g];
        self.log_conditional_g_into(obs, d, &mut out)?;
        Ok(out)
    }

    /// Normalized full conditional of `g^d`. Stimulus `d` must be detached.
    pub fn conditional_g(&self, obs: &Observations, d: usize) -> Result<Vec<f64>> {
        let mut w = self.log_conditional_g(obs, d)?;
        normalize_log_weights(&mut w);
        Ok(w)
    }

    /// Log of the unnormalized full conditional of `k^l`. Concept `l` must be
    /// detached.
    pub fn log_conditional_k_into(
        &mut self,
        obs: &Observations,
        l: usize,
        out: &mut [f64],
    ) -> Result<()> {
        self.check_concept(obs, l)?;
        if self.detached != Some(Site::Concept(l)) {
            return Err(Error::SiteNotDetached(Site::Concept(l).to_string()));
        }
        let Hyperparams {
            k, g, alpha, beta, ..
        } = self.hyper;
        let per_type = &mut self.type_scratch;
        per_type.iter_mut().for_each(|x| *x = 0);
        for &d in obs.stimuli_of(l) {
            per_type[self.g_assign[d]] += 1;
        }
        let n_l = obs.stimuli_of(l).len() as u32;
        let c = &self.counts;
        let g_beta = g as f64 * beta;
        for (j, slot) in out.iter_mut().enumerate().take(k) {
            let mut lw = (f64::from(c.n_cat[j]) + alpha).ln();
            if n_l > 0 {
                let row = j * g;
                for (i, &f) in per_type.iter().enumerate() {
                    if f > 0 {
                        lw += ln_rising(f64::from(c.n_cat_ft[row + i]) + beta, f);
                    }
                }
                lw -= ln_rising(f64::from(c.n_cat_total[j]) + g_beta, n_l);
            }
            *slot = lw;
        }
        Ok(())
    }

    pub fn log_conditional_k(&mut self, obs: &Observations, l: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.hyper.k];
        self.log_conditional_k_into(obs, l, &mut out)?;
        Ok(out)
    }

    /// Normalized full conditional of `k^l`. Concept `l` must be detached.
    pub fn conditional_k(&mut self, obs: &Observations, l: usize) -> Result<Vec<f64>> {
        let mut w = self.log_conditional_k(obs, l)?;
        normalize_log_weights(&mut w);
        Ok(w)
    }

    /// Detach, score, draw and re-attach stimulus `d`; returns the new label.
    pub fn resample_stimulus(&mut self, obs: &Observations, d: usize) -> Result<usize> {
        self.detach_stimulus(obs, d)?;
        let mut w = std::mem::take(&mut self.scratch);
        let g = self.hyper.g;
        let res = self.log_conditional_g_into(obs, d, &mut w[..g]);
        let i = res.map(|()| {
            normalize_log_weights(&mut w[..g]);
            sample_index(&mut self.rng, &w[..g])
        });
        self.scratch = w;
        let i = i?;
        self.attach_stimulus(obs, d, i)?;
        Ok(i)
    }

    pub fn resample_concept(&mut self, obs: &Observations, l: usize) -> Result<usize> {
        self.detach_concept(obs, l)?;
        let mut w = std::mem::take(&mut self.scratch);
        let k = self.hyper.k;
        let res = self.log_conditional_k_into(obs, l, &mut w[..k]);
        let j = res.map(|()| {
            normalize_log_weights(&mut w[..k]);
            sample_index(&mut self.rng, &w[..k])
        });
        self.scratch = w;
        let j = j?;
        self.attach_concept(obs, l, j)?;
        Ok(j)
    }

    /// One Gibbs sweep: every stimulus in index order, then every concept.
    pub fn sweep(&mut self, obs: &Observations) -> Result<()> {
        self.require_attached()?;
        for d in 0..obs.n_stimuli() {
            self.resample_stimulus(obs, d)?;
        }
        for l in 0..obs.n_concepts() {
            self.resample_concept(obs, l)?;
        }
        self.sweeps += 1;
        Ok(())
    }

    /// Log of the collapsed joint `p(k, g, f | c)`: three families of
    /// Dirichlet-multinomial marginals (categories, feature types per
    /// category, words per feature type).
    pub fn log_joint(&self) -> Result<f64> {
        self.require_attached()?;
        let Hyperparams {
            k,
            g,
            alpha,
            beta,
            gamma,
        } = self.hyper;
        let v = self.n_features;
        let c = &self.counts;
        let n_concepts: u32 = c.n_cat.iter().sum();
        let mut lp = dirmult(&c.n_cat, n_concepts, alpha);
        debug_assert_eq!(c.n_cat.len(), k);
        for j in 0..k {
            lp += dirmult(&c.n_cat_ft[j * g..(j + 1) * g], c.n_cat_total[j], beta);
        }
        for i in 0..g {
            lp += dirmult(&c.n_ft_feat[i * v..(i + 1) * v], c.n_ft_total[i], gamma);
        }
        Ok(lp)
    }
}

/// Log marginal of a count vector under a symmetric Dirichlet-multinomial.
fn dirmult(counts: &[u32], total: u32, conc: f64) -> f64 {
    let dim = counts.len() as f64;
    let mut lp = ln_gamma(dim * conc) - ln_gamma(f64::from(total) + dim * conc);
    let ln_g0 = ln_gamma(conc);
    for &n in counts {
        if n > 0 {
            lp += ln_gamma(f64::from(n) + conc) - ln_g0;
        }
    }
    lp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Observations {
        Observations::new(
            3,
            4,
            &[
                (0, vec![0, 1, 1]),
                (0, vec![2, 3, 0]),
                (1, vec![3, 3, 3]),
                (2, vec![1, 2, 0]),
                (1, vec![0, 0, 2]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn degenerate_label_space() {
        let obs = toy();
        let mut s = ModelState::init(&obs, Hyperparams::new(1, 1), 7).unwrap();
        assert!(s.g_assign().iter().all(|&i| i == 0));
        assert!(s.k_assign().iter().all(|&j| j == 0));
        assert_eq!(s.counts().n_cat, vec![3]);
        s.sweep(&obs).unwrap();
        assert!(s.g_assign().iter().all(|&i| i == 0));
        s.detach_stimulus(&obs, 1).unwrap();
        assert_eq!(s.conditional_g(&obs, 1).unwrap(), vec![1.0]);
        s.attach_stimulus(&obs, 1, 0).unwrap();
        s.detach_concept(&obs, 2).unwrap();
        assert_eq!(s.conditional_k(&obs, 2).unwrap(), vec![1.0]);
    }

    #[test]
    fn init_is_deterministic_and_consistent() {
        let obs = toy();
        let a = ModelState::init(&obs, Hyperparams::new(3, 2), 11).unwrap();
        let b = ModelState::init(&obs, Hyperparams::new(3, 2), 11).unwrap();
        assert_eq!(a.g_assign(), b.g_assign());
        assert_eq!(a.k_assign(), b.k_assign());
        assert_eq!(a.counts(), b.counts());
        assert!(a.is_consistent(&obs));
    }

    #[test]
    fn uniform_when_tables_empty() {
        // A single stimulus: once detached nothing else is counted anywhere.
        let obs = Observations::new(1, 3, &[(0, vec![0, 1, 2])]).unwrap();
        let mut s = ModelState::init(&obs, Hyperparams::new(2, 4), 3).unwrap();
        s.detach_stimulus(&obs, 0).unwrap();
        for p in s.conditional_g(&obs, 0).unwrap() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn concept_without_stimuli_follows_category_sizes() {
        let obs = Observations::new(3, 3, &[(0, vec![0, 1, 2]), (1, vec![0, 1, 2])]).unwrap();
        let hyper = Hyperparams::new(2, 2);
        let mut s =
            ModelState::from_assignments(&obs, hyper, vec![0, 1], vec![0, 0, 1], 0).unwrap();
        s.detach_concept(&obs, 2).unwrap();
        let w = s.conditional_k(&obs, 2).unwrap();
        let expect = [(2.0 + 0.7) / (2.0 + 1.4), 0.7 / (2.0 + 1.4)];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn scoring_requires_detached_site() {
        let obs = toy();
        let mut s = ModelState::init(&obs, Hyperparams::new(2, 2), 1).unwrap();
        assert!(matches!(
            s.conditional_g(&obs, 0),
            Err(Error::SiteNotDetached(_))
        ));
        assert!(matches!(
            s.conditional_k(&obs, 0),
            Err(Error::SiteNotDetached(_))
        ));
        assert!(matches!(
            s.detach_stimulus(&obs, 9),
            Err(Error::OutOfRange { .. })
        ));
        s.detach_stimulus(&obs, 0).unwrap();
        assert!(s.detach_stimulus(&obs, 1).is_err());
        assert!(s.log_joint().is_err());
        assert!(s.attach_stimulus(&obs, 1, 0).is_err());
    }

    #[test]
    fn empty_model_has_zero_log_joint() {
        let obs = Observations::new(1, 2, &[]).unwrap();
        let s = ModelState::init(&obs, Hyperparams::new(1, 2), 0).unwrap();
        assert!(s.log_joint().unwrap().abs() < 1e-12);
    }

    #[test]
    fn sweeps_keep_counts_consistent() {
        let obs = toy();
        let mut s = ModelState::init(&obs, Hyperparams::new(3, 3), 5).unwrap();
        for _ in 0..50 {
            s.sweep(&obs).unwrap();
            assert!(s.is_consistent(&obs));
        }
        assert_eq!(s.sweeps(), 50);
    }
}
