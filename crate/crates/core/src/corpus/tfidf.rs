use std::collections::HashMap;

use rayon::prelude::*;

use super::TokenizedDocument;
use crate::error::{Error, Result};

/// Per-document tf-idf scores, `tf(t, d) * ln(N / df(t))` with raw counts.
#[derive(Debug, Clone)]
pub struct TfIdf {
    doc_index: HashMap<String, usize>,
    scores: Vec<HashMap<String, f64>>,
}

impl TfIdf {
    /// Score of `term` in `doc_id`; zero when either is absent.
    pub fn score(&self, term: &str, doc_id: &str) -> f64 {
        self.doc_index
            .get(doc_id)
            .and_then(|&d| self.scores[d].get(term))
            .copied()
            .unwrap_or(0.0)
    }

    pub(crate) fn doc_scores(&self, doc: usize) -> &HashMap<String, f64> {
        &self.scores[doc]
    }

    pub fn n_documents(&self) -> usize {
        self.scores.len()
    }

    /// All `((term, doc_id), score)` entries with a present term.
    pub fn iter(&self) -> impl Iterator<Item = ((&str, &str), f64)> + '_ {
        let mut ids: Vec<(&str, usize)> = self
            .doc_index
            .iter()
            .map(|(k, &v)| (k.as_str(), v))
            .collect();
        ids.sort_by_key(|&(_, v)| v);
        ids.into_iter().flat_map(move |(doc_id, d)| {
            self.scores[d]
                .iter()
                .map(move |(t, &s)| ((t.as_str(), doc_id), s))
        })
    }
}

pub fn compute_tfidf(documents: &[TokenizedDocument]) -> Result<TfIdf> {
    if documents.is_empty() {
        return Err(Error::NoDocuments);
    }
    let mut doc_index = HashMap::with_capacity(documents.len());
    for (i, doc) in documents.iter().enumerate() {
        if doc_index.insert(doc.doc_id.clone(), i).is_some() {
            return Err(Error::DuplicateDocument(doc.doc_id.clone()));
        }
    }

    let term_counts: Vec<HashMap<&str, u32>> = documents
        .par_iter()
        .map(|doc| {
            let mut tf = HashMap::new();
            for tok in doc.sentences.iter().flatten() {
                *tf.entry(tok.as_str()).or_insert(0) += 1;
            }
            tf
        })
        .collect();

    let mut df: HashMap<&str, u32> = HashMap::new();
    for tf in &term_counts {
        for &t in tf.keys() {
            *df.entry(t).or_insert(0) += 1;
        }
    }

    let n_docs = documents.len() as f64;
    let scores = term_counts
        .par_iter()
        .map(|tf| {
            tf.iter()
                .map(|(&t, &count)| {
                    let idf = (n_docs / f64::from(df[t])).ln();
                    (t.to_owned(), f64::from(count) * idf)
                })
                .collect()
        })
        .collect();

    Ok(TfIdf { doc_index, scores })
}
