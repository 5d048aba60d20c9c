//! Comparison systems: a co-occurrence + k-means baseline, a BayesCat-style
//! Dirichlet mixture over (concept, context words) stimuli, and random
//! categorization.

mod assoc;
mod bayescat;
mod cooc;
mod kmeans;
mod random;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::Result;
use crate::fsutil::write_atomic;

pub use assoc::{build_assoc, AssocMatrix};
pub use bayescat::{
    bayescat_feature_types, bayescat_hard_assign, bayescat_train, BayesCatModel, BayesCatParams,
    BayesCatState,
};
pub use cooc::{cooc_categorize, cooc_feature_types};
pub use kmeans::{kmeans, KMeansResult};
pub use random::random_categorize;

/// Features grouped into types, with each category's weight on each type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTypeClustering {
    /// Feature id -> type id, for every clustered feature.
    pub assignment: BTreeMap<usize, usize>,
    pub n_types: usize,
    /// `relevance[category][type]`.
    pub relevance: Vec<Vec<f64>>,
}

impl FeatureTypeClustering {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_types];
        for (&f, &g) in &self.assignment {
            out[g].push(f);
        }
        out
    }

    /// `feature<TAB>type` rows in feature-id order.
    pub fn save_types_tsv(&self, vocab: &Vocabulary, path: &Path) -> Result<()> {
        write_atomic(path, |w| {
            writeln!(w, "feature\ttype")?;
            for (&f, &g) in &self.assignment {
                writeln!(w, "{}\t{g}", vocab.feature_name(f))?;
            }
            Ok(())
        })
    }

    /// `category<TAB>type<TAB>weight` rows, weights with 12 decimals.
    pub fn save_relevance_tsv(&self, path: &Path) -> Result<()> {
        save_relevance_tsv(&self.relevance, path)
    }
}

pub fn save_relevance_tsv(relevance: &[Vec<f64>], path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "category\ttype\tweight")?;
        for (k, row) in relevance.iter().enumerate() {
            for (g, weight) in row.iter().enumerate() {
                writeln!(w, "{k}\t{g}\t{weight:.12}")?;
            }
        }
        Ok(())
    })
}
