use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::categorization::Categorization;
use crate::error::{Error, Result};

/// Independent uniform category per concept.
pub fn random_categorize(n_concepts: usize, k: usize, seed: u64) -> Result<Categorization> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Categorization::new((0..n_concepts).map(|_| rng.random_range(0..k)).collect(), k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_category() {
        assert!(random_categorize(10, 1, 0)
            .unwrap()
            .labels()
            .iter()
            .all(|&k| k == 0));
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            random_categorize(50, 7, 3).unwrap(),
            random_categorize(50, 7, 3).unwrap()
        );
    }

    #[test]
    fn roughly_uniform() {
        let k = 10;
        let cat = random_categorize(100_000, k, 11).unwrap();
        let mut counts = vec![0f64; k];
        for &l in cat.labels() {
            counts[l] += 1.0;
        }
        let expected = 10_000.0;
        let chi2: f64 = counts
            .iter()
            .map(|c| (c - expected).powi(2) / expected)
            .sum();
        // 9 degrees of freedom; the 99.9th percentile is 27.88.
        assert!(chi2 < 27.88, "chi2 = {chi2}");
    }
}
