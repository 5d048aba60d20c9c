use std::collections::BTreeMap;

use super::{kmeans, AssocMatrix, FeatureTypeClustering};
use crate::categorization::Categorization;
use crate::error::{Error, Result};
use crate::sampler::chain_seeds;

const MAX_ITER: usize = 100;

/// k-means over raw co-occurrence rows.
pub fn cooc_categorize(assoc: &AssocMatrix, k: usize, seed: u64) -> Result<Categorization> {
    if k > assoc.n_concepts() {
        return Err(Error::TooManyClusters {
            k,
            n: assoc.n_concepts(),
        });
    }
    let rows: Vec<Vec<f64>> = assoc.rows().map(<[f64]>::to_vec).collect();
    let result = kmeans(&rows, k, seed, MAX_ITER)?;
    Categorization::new(result.assignment, k)
}

/// Per-category feature types. A feature is a candidate for a category when
/// it co-occurs with at least half of the category's members (rounded up);
/// candidates are clustered into at most `types_per_category` types using
/// their association with each member concept.
///
/// Type ids are global: category `z`'s local type `t` is `z * types_per_category + t`.
/// `relevance[z][type]` is the share of category `z`'s total member
/// association mass that falls on the type's features. Categories without
/// candidates get no types.
pub fn cooc_feature_types(
    assoc: &AssocMatrix,
    categorization: &Categorization,
    types_per_category: usize,
    seed: u64,
) -> Result<Vec<FeatureTypeClustering>> {
    if types_per_category == 0 {
        return Err(Error::InvalidParameter(
            "types per category must be at least 1".into(),
        ));
    }
    let members = categorization.members();
    let n_cat = members.len();
    let seeds = chain_seeds(seed, n_cat);
    let n_types = n_cat * types_per_category;
    let mut out = Vec::with_capacity(n_cat);
    for (z, mem) in members.iter().enumerate() {
        let mut clustering = FeatureTypeClustering {
            assignment: BTreeMap::new(),
            n_types,
            relevance: vec![vec![0.0; n_types]; n_cat],
        };
        if mem.is_empty() {
            out.push(clustering);
            continue;
        }
        let need = mem.len().div_ceil(2);
        let candidates: Vec<usize> = (0..assoc.n_features())
            .filter(|&f| mem.iter().filter(|&&c| assoc.get(c, f) > 0.0).count() >= need)
            .collect();
        if candidates.is_empty() {
            log::warn!(
                "category {z}: no feature co-occurs with half of its {} members",
                mem.len()
            );
            out.push(clustering);
            continue;
        }
        let vectors: Vec<Vec<f64>> = candidates
            .iter()
            .map(|&f| mem.iter().map(|&c| assoc.get(c, f)).collect())
            .collect();
        let k = types_per_category.min(candidates.len());
        let result = kmeans(&vectors, k, seeds[z], MAX_ITER)?;
        for (&f, &t) in candidates.iter().zip(&result.assignment) {
            clustering.assignment.insert(f, z * types_per_category + t);
        }
        for (other, omem) in members.iter().enumerate() {
            let total: f64 = omem.iter().flat_map(|&c| assoc.row(c)).sum();
            if total <= 0.0 {
                continue;
            }
            for (&f, &g) in &clustering.assignment {
                let mass: f64 = omem.iter().map(|&c| assoc.get(c, f)).sum();
                clustering.relevance[other][g] += mass / total;
            }
        }
        out.push(clustering);
    }
    Ok(out)
}
