use std::collections::BTreeMap;

use super::IntruderTask;
use crate::error::{Error, Result};

/// Annotator choices per task. Choices are 0-based item positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResponseSet {
    by_task: BTreeMap<String, Vec<(String, usize)>>,
}

impl ResponseSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, task_id: &str, annotator_id: &str, choice: usize) {
        self.by_task
            .entry(task_id.to_owned())
            .or_default()
            .push((annotator_id.to_owned(), choice));
    }

    pub fn tasks(&self) -> impl Iterator<Item = (&str, &[(String, usize)])> {
        self.by_task.iter().map(|(t, r)| (t.as_str(), r.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.by_task.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fraction of (task, annotator) pairs that picked the intruder.
pub fn score_accuracy(tasks: &[IntruderTask], responses: &ResponseSet) -> Result<f64> {
    let index: BTreeMap<&str, &IntruderTask> =
        tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    let mut correct = 0usize;
    let mut total = 0usize;
    for (task_id, rs) in responses.tasks() {
        let task = index
            .get(task_id)
            .ok_or_else(|| Error::UnknownTask(task_id.to_owned()))?;
        for (annotator, choice) in rs {
            if *choice >= task.n_items() {
                return Err(Error::InvalidParameter(format!(
                    "annotator {annotator} chose item {} of {} in task {task_id}",
                    choice + 1,
                    task.n_items()
                )));
            }
            correct += usize::from(*choice == task.answer_index);
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::InvalidParameter("no responses to score".into()));
    }
    Ok(correct as f64 / total as f64)
}

/// Fleiss' kappa over item positions `0..n_categories`. Tasks with more
/// annotators than the smallest task are truncated to that count.
pub fn fleiss_kappa(responses: &ResponseSet, n_categories: usize) -> Result<f64> {
    let per_task: Vec<&[(String, usize)]> = responses
        .tasks()
        .map(|(_, r)| r)
        .filter(|r| !r.is_empty())
        .collect();
    let n = per_task.iter().map(|r| r.len()).min().unwrap_or(0);
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "agreement needs at least 2 annotators per task, found {n}"
        )));
    }
    if per_task.iter().any(|r| r.len() != n) {
        log::warn!("unequal annotator counts, truncating every task to {n} annotators");
    }
    let mut pooled = vec![0u64; n_categories];
    let mut p_bar = 0.0;
    for rs in &per_task {
        let mut counts = vec![0u64; n_categories];
        for (_, choice) in &rs[..n] {
            let slot = counts.get_mut(*choice).ok_or(Error::OutOfRange {
                what: "choice",
                id: *choice,
                size: n_categories,
            })?;
            *slot += 1;
        }
        let agree: u64 = counts.iter().map(|c| c * c).sum::<u64>() - n as u64;
        p_bar += agree as f64 / (n * (n - 1)) as f64;
        for (p, c) in pooled.iter_mut().zip(&counts) {
            *p += c;
        }
    }
    let n_tasks = per_task.len() as f64;
    p_bar /= n_tasks;
    let total = n_tasks * n as f64;
    let p_e: f64 = pooled.iter().map(|&c| (c as f64 / total).powi(2)).sum();
    if (1.0 - p_e).abs() < 1e-12 {
        return if (1.0 - p_bar).abs() < 1e-12 {
            Ok(1.0)
        } else {
            Err(Error::DegenerateMarginals(p_e))
        };
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// Standard error of Fleiss' kappa under the null of no agreement beyond
/// chance, for `n_tasks` tasks rated by `n_annotators` each with category
/// proportions `marginals` (Fleiss, Nee and Landis, 1979).
pub fn fleiss_kappa_null_se(n_tasks: usize, n_annotators: usize, marginals: &[f64]) -> f64 {
    let pq: f64 = marginals.iter().map(|p| p * (1.0 - p)).sum();
    let skew: f64 = marginals
        .iter()
        .map(|p| p * (1.0 - p) * (1.0 - 2.0 * p))
        .sum();
    let scale = (n_tasks as f64 * n_annotators as f64 * (n_annotators as f64 - 1.0)).sqrt();
    std::f64::consts::SQRT_2 / (pq * scale) * (pq * pq - skew).sqrt()
}
