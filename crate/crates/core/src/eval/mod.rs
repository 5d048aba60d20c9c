//! Clustering metrics against a gold standard and the concept-prediction
//! task.

mod metrics;
mod predict;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

pub use metrics::{
    collocation, contingency, evaluate, f_beta, purity, v_measure, write_metrics_report,
    ClusteringScores, ContingencyTable, VMeasure,
};
pub use predict::{
    predict_concept_assoc, predict_concept_bayescat, predict_concept_bcf, random_ranking,
    ranking_metrics, write_ranking_report, Prediction, RankingResult,
};

use crate::categorization::read_two_column_tsv;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldStandard {
    mapping: BTreeMap<String, String>,
    labels: Vec<String>,
}

impl GoldStandard {
    pub fn new(mapping: BTreeMap<String, String>) -> Result<Self> {
        if mapping.is_empty() {
            return Err(Error::InvalidParameter("gold standard is empty".into()));
        }
        let labels = mapping
            .values()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(GoldStandard { mapping, labels })
    }

    /// Reads a `concept<TAB>label` file.
    pub fn load(path: &Path) -> Result<Self> {
        Self::new(read_two_column_tsv(path)?.into_iter().collect())
    }

    pub fn label(&self, concept: &str) -> Option<&str> {
        self.mapping.get(concept).map(String::as_str)
    }

    pub fn mapping(&self) -> &BTreeMap<String, String> {
        &self.mapping
    }

    /// Distinct labels, sorted.
    pub fn category_labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }
}
