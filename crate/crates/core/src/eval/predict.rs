use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::baselines::{AssocMatrix, BayesCatModel};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::math::{argsort_desc, log_sum_exp};
use crate::sampler::PosteriorSummary;

/// Concepts ranked best-first. Ties go to the lower concept id.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub ranking: Vec<usize>,
    /// Per-concept score, log scale for the probabilistic models.
    pub scores: Vec<f64>,
    /// Feature tokens ignored because the model does not know them.
    pub skipped: usize,
}

impl Prediction {
    fn from_scores(scores: Vec<f64>, skipped: usize) -> Self {
        Prediction {
            ranking: argsort_desc(&scores),
            scores,
            skipped,
        }
    }

    /// 1-based rank of `concept`.
    pub fn rank_of(&self, concept: usize) -> Option<usize> {
        self.ranking
            .iter()
            .position(|&c| c == concept)
            .map(|p| p + 1)
    }
}

fn known_features(features: &[usize], n_features: usize) -> Result<(Vec<usize>, usize)> {
    let known: Vec<usize> = features
        .iter()
        .copied()
        .filter(|&f| f < n_features)
        .collect();
    let skipped = features.len() - known.len();
    if known.is_empty() {
        return Err(Error::AllFeaturesUnknown);
    }
    if skipped > 0 {
        log::debug!("skipped {skipped} unknown feature tokens");
    }
    Ok((known, skipped))
}

/// `Score(c|f) = Σ_g μ[k_c][g] Π_f φ[g][f]`, evaluated in log space.
/// `k_assign` gives each concept's category; feature ids at or beyond the
/// model's vocabulary are skipped.
pub fn predict_concept_bcf(
    summary: &PosteriorSummary,
    k_assign: &[usize],
    features: &[usize],
) -> Result<Prediction> {
    let v = summary.phi.first().map_or(0, Vec::len);
    let (known, skipped) = known_features(features, v)?;
    let log_lik: Vec<f64> = summary
        .phi
        .iter()
        .map(|row| known.iter().map(|&f| row[f].ln()).sum())
        .collect();
    let per_category: Vec<f64> = summary
        .mu
        .iter()
        .map(|mu_k| {
            let terms: Vec<f64> = mu_k.iter().zip(&log_lik).map(|(m, l)| m.ln() + l).collect();
            log_sum_exp(&terms)
        })
        .collect();
    let scores = k_assign
        .iter()
        .map(|&k| {
            per_category.get(k).copied().ok_or(Error::OutOfRange {
                what: "category",
                id: k,
                size: per_category.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Prediction::from_scores(scores, skipped))
}

/// `Score(c|f) = Σ_k p(c|k) Π_f p(f|k)`, evaluated in log space.
pub fn predict_concept_bayescat(model: &BayesCatModel, features: &[usize]) -> Result<Prediction> {
    let v = model.p_f_given_z.first().map_or(0, Vec::len);
    let l = model.p_c_given_z.first().map_or(0, Vec::len);
    let (known, skipped) = known_features(features, v)?;
    let log_lik: Vec<f64> = model
        .p_f_given_z
        .iter()
        .map(|row| known.iter().map(|&f| row[f].ln()).sum())
        .collect();
    let scores = (0..l)
        .map(|c| {
            let terms: Vec<f64> = model
                .p_c_given_z
                .iter()
                .zip(&log_lik)
                .map(|(pc, ll)| pc[c].ln() + ll)
                .collect();
            log_sum_exp(&terms)
        })
        .collect();
    Ok(Prediction::from_scores(scores, skipped))
}

/// Additive association score; unknown features contribute nothing.
pub fn predict_concept_assoc(assoc: &AssocMatrix, features: &[usize]) -> Prediction {
    let v = assoc.n_features();
    let skipped = features.iter().filter(|&&f| f >= v).count();
    let scores = assoc
        .rows()
        .map(|row| features.iter().filter(|&&f| f < v).map(|&f| row[f]).sum())
        .collect();
    Prediction::from_scores(scores, skipped)
}

/// A uniformly random ordering of `n_concepts` concepts.
pub fn random_ranking<R: Rng + ?Sized>(rng: &mut R, n_concepts: usize) -> Prediction {
    let mut ranking: Vec<usize> = (0..n_concepts).collect();
    ranking.shuffle(rng);
    let mut scores = vec![0.0; n_concepts];
    for (pos, &c) in ranking.iter().enumerate() {
        scores[c] = -(pos as f64);
    }
    Prediction {
        ranking,
        scores,
        skipped: 0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingResult {
    pub ranks: Vec<usize>,
    pub precision_at_1: f64,
    pub precision_at_10: f64,
    pub precision_at_20: f64,
    pub mean_rank: f64,
}

impl RankingResult {
    pub fn precision_at(&self, k: usize) -> f64 {
        self.ranks.iter().filter(|&&r| r <= k).count() as f64 / self.ranks.len() as f64
    }
}

pub fn ranking_metrics(ranks: Vec<usize>, n_concepts: usize) -> Result<RankingResult> {
    if ranks.is_empty() {
        return Err(Error::InvalidParameter("no ranks to summarize".into()));
    }
    if let Some(&bad) = ranks.iter().find(|&&r| r == 0 || r > n_concepts) {
        return Err(Error::InvalidParameter(format!(
            "rank {bad} outside 1..={n_concepts}"
        )));
    }
    let at = |k: usize| ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64;
    let mean_rank = ranks.iter().sum::<usize>() as f64 / ranks.len() as f64;
    Ok(RankingResult {
        precision_at_1: at(1),
        precision_at_10: at(10),
        precision_at_20: at(20),
        mean_rank,
        ranks,
    })
}

/// One row per model: `model pr@1 pr@10 pr@20 avg_rank`, three decimals.
pub fn write_ranking_report(rows: &[(String, RankingResult)], path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "model\tpr@1\tpr@10\tpr@20\tavg_rank")?;
        for (model, r) in rows {
            writeln!(
                w,
                "{model}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
                r.precision_at_1, r.precision_at_10, r.precision_at_20, r.mean_rank
            )?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_category_single_type_ties() {
        let s = PosteriorSummary {
            theta: vec![1.0],
            mu: vec![vec![1.0]],
            phi: vec![vec![0.5, 0.5]],
        };
        let p = predict_concept_bcf(&s, &[0, 0, 0, 0], &[1, 0]).unwrap();
        assert_eq!(p.ranking, vec![0, 1, 2, 3]);
    }

    #[test]
    fn bcf_hand_scores() {
        let s = PosteriorSummary {
            theta: vec![0.5, 0.5],
            mu: vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            phi: vec![vec![0.7, 0.3], vec![0.1, 0.9]],
        };
        // features [0, 0]: k0 = 0.9*0.49 + 0.1*0.01 = 0.442 ; k1 = 0.2*0.49 + 0.8*0.01 = 0.106
        let p = predict_concept_bcf(&s, &[1, 0, 1], &[0, 0, 7]).unwrap();
        assert!((p.scores[1] - 0.442f64.ln()).abs() < 1e-12);
        assert!((p.scores[0] - 0.106f64.ln()).abs() < 1e-12);
        assert_eq!(p.ranking, vec![1, 0, 2]);
        assert_eq!(p.skipped, 1);
        assert_eq!(p.rank_of(2), Some(3));
        assert!(matches!(
            predict_concept_bcf(&s, &[0], &[5]),
            Err(Error::AllFeaturesUnknown)
        ));
    }

    #[test]
    fn bayescat_hand_scores() {
        let m = BayesCatModel {
            p_z: vec![0.5, 0.5],
            p_c_given_z: vec![vec![0.8, 0.2], vec![0.3, 0.7]],
            p_f_given_z: vec![vec![0.6, 0.4], vec![0.1, 0.9]],
        };
        // f = [1]: c0 = 0.8*0.4 + 0.3*0.9 = 0.59 ; c1 = 0.2*0.4 + 0.7*0.9 = 0.71
        let p = predict_concept_bayescat(&m, &[1]).unwrap();
        assert!((p.scores[0] - 0.59f64.ln()).abs() < 1e-12);
        assert!((p.scores[1] - 0.71f64.ln()).abs() < 1e-12);
        assert_eq!(p.ranking, vec![1, 0]);

        let one = BayesCatModel {
            p_z: vec![1.0],
            p_c_given_z: vec![vec![0.5, 0.5]],
            p_f_given_z: vec![vec![1.0]],
        };
        assert_eq!(
            predict_concept_bayescat(&one, &[0]).unwrap().ranking,
            vec![0, 1]
        );
    }

    #[test]
    fn assoc_hand_ranking() {
        let a = AssocMatrix::from_dense(3, 3, vec![1.0, 0.0, 2.0, 0.0, 4.0, 0.0, 3.0, 1.0, 0.0], 0);
        assert_eq!(predict_concept_assoc(&a, &[0]).ranking, vec![2, 0, 1]);
        // [0, 2] -> 3, 0, 3: tie between 0 and 2 goes to 0.
        assert_eq!(predict_concept_assoc(&a, &[0, 2, 9]).ranking, vec![0, 2, 1]);
        let zero = AssocMatrix::from_dense(3, 1, vec![0.0; 3], 0);
        assert_eq!(predict_concept_assoc(&zero, &[0]).ranking, vec![0, 1, 2]);
    }

    #[test]
    fn ranking_arithmetic() {
        let r = ranking_metrics(vec![1, 5, 30], 50).unwrap();
        assert!((r.precision_at_1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.precision_at_10 - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.precision_at_20 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.mean_rank, 12.0);
        let all = ranking_metrics(vec![1; 4], 4).unwrap();
        assert_eq!(
            (all.precision_at_1, all.precision_at_20, all.mean_rank),
            (1.0, 1.0, 1.0)
        );
        assert!(ranking_metrics(vec![0], 4).is_err());
        assert!(ranking_metrics(vec![5], 4).is_err());
    }

    #[test]
    fn random_ranking_is_permutation() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let p = random_ranking(&mut rng, 20);
        let mut sorted = p.ranking.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());
        assert_eq!(argsort_desc(&p.scores), p.ranking);
    }
}
