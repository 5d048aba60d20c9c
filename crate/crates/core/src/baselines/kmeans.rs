use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::sample_index;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances to the assigned centroid, after each iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

impl KMeansResult {
    pub fn objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(0.0)
    }
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means++ seeding: first centre uniform, later centres with probability
/// proportional to squared distance from the nearest chosen centre.
fn seed_centroids(vectors: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = vectors.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![vectors[first].clone()];
    let mut dist: Vec<f64> = vectors
        .iter()
        .map(|v| sq_dist(v, &vectors[first]))
        .collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            sample_index(rng, &dist)
        } else {
            // Only duplicates of chosen centres remain.
            (0..n).find(|&i| !chosen[i]).expect("k <= n")
        };
        chosen[next] = true;
        centroids.push(vectors[next].clone());
        for (i, v) in vectors.iter().enumerate() {
            dist[i] = dist[i].min(sq_dist(v, &vectors[next]));
        }
    }
    centroids
}

/// Lloyd's algorithm with seeded k-means++ initialisation.
///
/// Ties in the assignment step go to the lowest centroid index. A cluster
/// that empties is re-seeded with the point farthest from its own centroid.
pub fn kmeans(vectors: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult> {
    let n = vectors.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::TooManyClusters { k, n });
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::InvalidParameter(
            "vectors differ in dimension".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(vectors, k, &mut rng);
    let mut assignment = vec![usize::MAX; n];
    let mut dist = vec![0.0; n];
    let mut trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let mut changed = false;
        for (i, v) in vectors.iter().enumerate() {
            let (c, d) = nearest(v, &centroids);
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
            dist[i] = d;
        }

        let mut sizes = vec![0usize; k];
        for &c in &assignment {
            sizes[c] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let donor = (0..n)
                .filter(|&i| sizes[assignment[i]] > 1)
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if dist[b] >= dist[i] => Some(b),
                    _ => Some(i),
                })
                .expect("k <= n leaves a cluster with spare points");
            sizes[assignment[donor]] -= 1;
            assignment[donor] = empty;
            sizes[empty] = 1;
            dist[donor] = 0.0;
            centroids[empty] = vectors[donor].clone();
            changed = true;
        }

        for (c, centroid) in centroids.iter_mut().enumerate() {
            centroid.iter_mut().for_each(|x| *x = 0.0);
            for (i, v) in vectors.iter().enumerate() {
                if assignment[i] == c {
                    for (x, y) in centroid.iter_mut().zip(v) {
                        *x += y;
                    }
                }
            }
            let size = sizes[c] as f64;
            centroid.iter_mut().for_each(|x| *x /= size);
        }

        let objective = vectors
            .iter()
            .zip(&assignment)
            .map(|(v, &c)| sq_dist(v, &centroids[c]))
            .sum();
        trace.push(objective);
        if !changed {
            break;
        }
    }

    Ok(KMeansResult {
        assignment,
        centroids,
        objective_trace: trace,
        iterations,
    })
}
