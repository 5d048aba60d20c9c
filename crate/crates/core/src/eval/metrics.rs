use std::collections::BTreeMap;
use std::path::Path;

use super::GoldStandard;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

/// Overlap counts between induced clusters (rows) and gold classes
/// (columns). Only labels that occur in the evaluated intersection get a
/// row or column, both in ascending label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    n: u64,
}

impl ContingencyTable {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let width = counts.first().map_or(0, Vec::len);
        if counts.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidParameter("ragged contingency table".into()));
        }
        let n = counts.iter().flatten().sum();
        if n == 0 {
            return Err(Error::EmptyIntersection);
        }
        Ok(ContingencyTable { counts, n })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    fn n_cols(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<u64> {
        (0..self.n_cols())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }
}

/// Builds the table over the concepts present in both `pred` and `gold`.
pub fn contingency(
    pred: &BTreeMap<String, usize>,
    gold: &GoldStandard,
) -> Result<ContingencyTable> {
    let pairs: Vec<(usize, &str)> = pred
        .iter()
        .filter_map(|(c, &k)| gold.label(c).map(|g| (k, g)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let rows: BTreeMap<usize, usize> = index_of(pairs.iter().map(|p| p.0));
    let cols: BTreeMap<&str, usize> = index_of(pairs.iter().map(|p| p.1));
    let mut counts = vec![vec![0u64; cols.len()]; rows.len()];
    for (k, g) in pairs {
        counts[rows[&k]][cols[g]] += 1;
    }
    ContingencyTable::from_counts(counts)
}

fn index_of<T: Ord>(items: impl Iterator<Item = T>) -> BTreeMap<T, usize> {
    let mut map: BTreeMap<T, usize> = items.map(|t| (t, 0)).collect();
    for (i, v) in map.values_mut().enumerate() {
        *v = i;
    }
    map
}

pub fn purity(table: &ContingencyTable) -> f64 {
    let hits: u64 = table
        .counts
        .iter()
        .map(|r| r.iter().copied().max().unwrap_or(0))
        .sum();
    hits as f64 / table.n as f64
}

pub fn collocation(table: &ContingencyTable) -> f64 {
    let hits: u64 = (0..table.n_cols())
        .map(|j| table.counts.iter().map(|r| r[j]).max().unwrap_or(0))
        .sum();
    hits as f64 / table.n as f64
}

/// `(1+β)·pu·co / (β·pu + co)`; zero when both inputs are zero.
pub fn f_beta(pu: f64, co: f64, beta: f64) -> f64 {
    let denom = beta * pu + co;
    if denom == 0.0 {
        return 0.0;
    }
    (1.0 + beta) * pu * co / denom
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VMeasure {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

fn entropy(marginal: &[u64], n: f64) -> f64 {
    marginal
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

pub fn v_measure(table: &ContingencyTable, beta: f64) -> VMeasure {
    let n = table.n as f64;
    let rows = table.row_sums();
    let cols = table.col_sums();
    let h_c = entropy(&rows, n);
    let h_g = entropy(&cols, n);
    // H(G|C) and H(C|G) from the joint.
    let mut h_g_given_c = 0.0;
    let mut h_c_given_g = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let p = c as f64 / n;
            h_g_given_c -= p * (c as f64 / rows[i] as f64).ln();
            h_c_given_g -= p * (c as f64 / cols[j] as f64).ln();
        }
    }
    let homogeneity = if h_g == 0.0 {
        1.0
    } else {
        1.0 - h_g_given_c / h_g
    };
    let completeness = if h_c == 0.0 {
        1.0
    } else {
        1.0 - h_c_given_g / h_c
    };
    VMeasure {
        homogeneity,
        completeness,
        v_measure: f_beta(homogeneity, completeness, beta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringScores {
    pub purity: f64,
    pub collocation: f64,
    pub f1: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
    pub n: u64,
}

pub fn evaluate(table: &ContingencyTable) -> ClusteringScores {
    let pu = purity(table);
    let co = collocation(table);
    let vm = v_measure(table, 1.0);
    ClusteringScores {
        purity: pu,
        collocation: co,
        f1: f_beta(pu, co, 1.0),
        homogeneity: vm.homogeneity,
        completeness: vm.completeness,
        v_measure: vm.v_measure,
        n: table.n,
    }
}

/// One row per model: `model pu co F1 VH VC VM`, three decimals.
pub fn write_metrics_report(rows: &[(String, ClusteringScores)], path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "model\tpu\tco\tF1\tVH\tVC\tVM")?;
        for (model, s) in rows {
            writeln!(
                w,
                "{model}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
                s.purity, s.collocation, s.f1, s.homogeneity, s.completeness, s.v_measure
            )?;
        }
        Ok(())
    })
}
