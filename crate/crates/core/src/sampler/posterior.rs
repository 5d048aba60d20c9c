use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CountTables, Hyperparams, ModelState};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::math::argsort_desc;

/// Smoothed point estimates of the category, feature-type and word
/// distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    /// Length K.
    pub theta: Vec<f64>,
    /// K rows over G feature types.
    pub mu: Vec<Vec<f64>>,
    /// G rows over V features.
    pub phi: Vec<Vec<f64>>,
}

fn smoothed(counts: &[u32], conc: f64) -> Vec<f64> {
    let total: f64 = counts.iter().map(|&n| f64::from(n)).sum::<f64>() + counts.len() as f64 * conc;
    counts
        .iter()
        .map(|&n| (f64::from(n) + conc) / total)
        .collect()
}

impl PosteriorSummary {
    pub fn from_counts(counts: &CountTables, hyper: &Hyperparams, n_features: usize) -> Self {
        let Hyperparams {
            g,
            alpha,
            beta,
            gamma,
            ..
        } = *hyper;
        PosteriorSummary {
            theta: smoothed(&counts.n_cat, alpha),
            mu: counts
                .n_cat_ft
                .chunks(g)
                .map(|row| smoothed(row, beta))
                .collect(),
            phi: counts
                .n_ft_feat
                .chunks(n_features.max(1))
                .take(g)
                .map(|row| smoothed(row, gamma))
                .collect(),
        }
    }

    pub fn n_categories(&self) -> usize {
        self.theta.len()
    }

    pub fn n_feature_types(&self) -> usize {
        self.phi.len()
    }
}

impl ModelState {
    /// Posterior means given the current assignments.
    pub fn posterior_means(&self) -> Result<PosteriorSummary> {
        if let Some(site) = self.detached() {
            return Err(Error::InvalidParameter(format!("{site} is still detached")));
        }
        let v = self.counts().n_ft_feat.len() / self.hyper().g;
        Ok(PosteriorSummary::from_counts(
            self.counts(),
            self.hyper(),
            v,
        ))
    }
}

/// The `n` most probable words of feature type `g`.
pub fn top_features(
    summary: &PosteriorSummary,
    vocab: &Vocabulary,
    g: usize,
    n: usize,
) -> Result<Vec<(String, f64)>> {
    let row = summary.phi.get(g).ok_or(Error::OutOfRange {
        what: "feature type",
        id: g,
        size: summary.phi.len(),
    })?;
    Ok(argsort_desc(row)
        .into_iter()
        .take(n)
        .map(|v| (vocab.feature_name(v).to_owned(), row[v]))
        .collect())
}

/// The `n` feature types most associated with category `k`.
pub fn top_feature_types(
    summary: &PosteriorSummary,
    k: usize,
    n: usize,
) -> Result<Vec<(usize, f64)>> {
    let row = summary.mu.get(k).ok_or(Error::OutOfRange {
        what: "category",
        id: k,
        size: summary.mu.len(),
    })?;
    Ok(argsort_desc(row)
        .into_iter()
        .take(n)
        .map(|i| (i, row[i]))
        .collect())
}

/// Concept names per category (every category present, possibly empty).
pub fn category_members(state: &ModelState, vocab: &Vocabulary) -> BTreeMap<usize, Vec<String>> {
    let mut out: BTreeMap<usize, Vec<String>> =
        (0..state.hyper().k).map(|j| (j, Vec::new())).collect();
    for (l, &j) in state.k_assign().iter().enumerate() {
        out.entry(j)
            .or_default()
            .push(vocab.concept_name(l).to_owned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::Observations;

    #[test]
    fn zero_counts_give_uniform_rows() {
        let hyper = Hyperparams::new(2, 3);
        let counts = CountTables::recount(&Observations::new(0, 4, &[]).unwrap(), &hyper, &[], &[]);
        let s = PosteriorSummary::from_counts(&counts, &hyper, 4);
        assert_eq!(s.theta, vec![0.5, 0.5]);
        assert!(s
            .mu
            .iter()
            .flatten()
            .all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
        assert!(s.phi.iter().flatten().all(|&p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn hand_filled_tables() {
        let hyper = Hyperparams {
            k: 2,
            g: 2,
            alpha: 1.0,
            beta: 0.5,
            gamma: 1.0,
        };
        let counts = CountTables {
            n_cat: vec![3, 1],
            n_cat_ft: vec![2, 0, 1, 3],
            n_cat_total: vec![2, 4],
            n_ft_feat: vec![1, 3, 0, 0],
            n_ft_total: vec![4, 0],
        };
        let s = PosteriorSummary::from_counts(&counts, &hyper, 2);
        assert_eq!(s.theta, vec![4.0 / 6.0, 2.0 / 6.0]);
        assert_eq!(s.mu[0], vec![2.5 / 3.0, 0.5 / 3.0]);
        assert_eq!(s.mu[1], vec![1.5 / 5.0, 3.5 / 5.0]);
        assert_eq!(s.phi[0], vec![2.0 / 6.0, 4.0 / 6.0]);
        assert_eq!(s.phi[1], vec![0.5, 0.5]);
        for row in s.mu.iter().chain(&s.phi).chain([&s.theta]) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn top_lists() {
        let vocab =
            Vocabulary::from_names(vec![], vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let s = PosteriorSummary {
            theta: vec![1.0],
            mu: vec![vec![0.2, 0.5, 0.3]],
            phi: vec![vec![0.25, 0.5, 0.25], vec![1.0 / 3.0; 3]],
        };
        let top = top_features(&s, &vocab, 0, 10).unwrap();
        assert_eq!(
            top,
            vec![("b".into(), 0.5), ("a".into(), 0.25), ("c".into(), 0.25)]
        );
        let uniform: Vec<_> = top_features(&s, &vocab, 1, 2)
            .unwrap()
            .into_iter()
            .map(|x| x.0)
            .collect();
        assert_eq!(uniform, ["a", "b"]);
        assert_eq!(
            top_feature_types(&s, 0, 2).unwrap(),
            vec![(1, 0.5), (2, 0.3)]
        );
        assert!(top_features(&s, &vocab, 2, 1).is_err());
        assert!(top_feature_types(&s, 1, 1).is_err());
    }
}
