//! Small numeric helpers shared by the samplers and the evaluation code.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

/// Natural log of the gamma function.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Log of the rising factorial `x (x + 1) ... (x + n - 1)`.
///
/// Short runs are multiplied out directly, which is both faster and more
/// accurate than a difference of two large `ln_gamma` values.
#[inline]
pub fn ln_rising(x: f64, n: u32) -> f64 {
    if n <= 24 {
        let mut prod = 1.0;
        let mut acc = 0.0;
        for a in 0..n {
            prod *= x + f64::from(a);
            if prod > 1e250 {
                acc += prod.ln();
                prod = 1.0;
            }
        }
        acc + prod.ln()
    } else {
        ln_gamma(x + f64::from(n)) - ln_gamma(x)
    }
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Turn log weights into a probability vector in place (max-subtracted).
pub fn normalize_log_weights(weights: &mut [f64]) {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for w in weights.iter_mut() {
        *w = (*w - max).exp();
        total += *w;
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
}

/// Draw an index from unnormalized, non-negative weights.
#[inline]
pub fn sample_index<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    // Rounding can leave `u` a hair above the last bucket.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Draw from a Dirichlet distribution with the given concentration vector.
pub fn sample_dirichlet<R: Rng + ?Sized>(rng: &mut R, alpha: &[f64]) -> Vec<f64> {
    let mut draw: Vec<f64> = alpha
        .iter()
        .map(|&a| {
            Gamma::new(a, 1.0)
                .expect("positive concentration")
                .sample(rng)
        })
        .collect();
    let total: f64 = draw.iter().sum();
    if total > 0.0 && total.is_finite() {
        draw.iter_mut().for_each(|x| *x /= total);
    } else {
        // Every gamma draw underflowed; all mass goes to one component.
        draw.iter_mut().for_each(|x| *x = 0.0);
        let pick = rng.random_range(0..draw.len());
        draw[pick] = 1.0;
    }
    draw
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Indices sorted by descending value, lower index first among equal values.
pub fn argsort_desc(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rising_matches_gamma_ratio() {
        for &x in &[0.1, 0.7, 3.0, 1234.5] {
            for n in [0u32, 1, 5, 24, 25, 300] {
                let direct = ln_gamma(x + f64::from(n)) - ln_gamma(x);
                let got = ln_rising(x, n);
                assert!(
                    (got - direct).abs() <= 1e-9 * direct.abs().max(1.0),
                    "{x} {n}"
                );
            }
        }
    }

    #[test]
    fn normalize_handles_large_offsets() {
        let mut w = vec![-1000.0, -1000.0 + 2f64.ln()];
        normalize_log_weights(&mut w);
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sample_index_skips_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(sample_index(&mut rng, &[0.0, 2.0, 0.0]), 1);
        }
    }

    #[test]
    fn dirichlet_is_a_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = sample_dirichlet(&mut rng, &[0.1; 7]);
        assert_eq!(d.len(), 7);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn argsort_ties_prefer_low_index() {
        assert_eq!(argsort_desc(&[1.0, 3.0, 1.0, 3.0]), vec![1, 3, 0, 2]);
        assert_eq!(argmax(&[2.0, 5.0, 5.0]), 1);
    }
}
