//! Hard assignments of concepts to categories, shared by every model.

use std::collections::BTreeMap;
use std::path::Path;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Categorization {
    labels: Vec<usize>,
    n_categories: usize,
}

impl Categorization {
    pub fn new(labels: Vec<usize>, n_categories: usize) -> Result<Self> {
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= n_categories) {
            return Err(Error::InvalidParameter(format!(
                "concept {i} has category {l} but only {n_categories} categories exist"
            )));
        }
        Ok(Categorization {
            labels,
            n_categories,
        })
    }

    /// Category of each concept id.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_categories(&self) -> usize {
        self.n_categories
    }

    /// Concept ids per category, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_categories];
        for (c, &k) in self.labels.iter().enumerate() {
            out[k].push(c);
        }
        out
    }

    pub fn to_named(&self, vocab: &Vocabulary) -> BTreeMap<String, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(c, &k)| (vocab.concept_name(c).to_owned(), k))
            .collect()
    }

    /// `concept<TAB>category` rows in concept-id order, with a header line.
    pub fn save_tsv(&self, vocab: &Vocabulary, path: &Path) -> Result<()> {
        write_atomic(path, |w| {
            writeln!(w, "concept\tcategory")?;
            for (c, &k) in self.labels.iter().enumerate() {
                writeln!(w, "{}\t{k}", vocab.concept_name(c))?;
            }
            Ok(())
        })
    }
}

/// Reads a two-column TSV (`concept`, `label`). A leading `concept` header
/// row is skipped. Duplicate concepts are an error.
pub fn read_two_column_tsv(path: &Path) -> Result<Vec<(String, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        if i == 0 && row.get(0) == Some("concept") {
            continue;
        }
        if row.len() != 2 {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected 2 columns, found {}", row.len()),
            ));
        }
        let concept = row[0].to_owned();
        if !seen.insert(concept.clone()) {
            return Err(Error::parse(
                path,
                i + 1,
                format!("duplicate concept {concept:?}"),
            ));
        }
        out.push((concept, row[1].to_owned()));
    }
    Ok(out)
}

/// Reads a categorization file into `concept -> category id`.
///
/// Integer labels are used as ids. Any other labels are numbered in sorted
/// order, so a gold-standard file can be read as a prediction.
pub fn load_categorization(path: &Path) -> Result<BTreeMap<String, usize>> {
    let rows = read_two_column_tsv(path)?;
    let numeric: Option<Vec<usize>> = rows.iter().map(|(_, k)| k.parse().ok()).collect();
    if let Some(ids) = numeric {
        return Ok(rows.into_iter().map(|(c, _)| c).zip(ids).collect());
    }
    let labels: std::collections::BTreeSet<&str> = rows.iter().map(|(_, k)| k.as_str()).collect();
    let id_of: BTreeMap<&str, usize> = labels
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    Ok(rows
        .iter()
        .map(|(c, k)| (c.clone(), id_of[k.as_str()]))
        .collect())
}
