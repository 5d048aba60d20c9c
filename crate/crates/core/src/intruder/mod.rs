//! Intrusion tasks for human evaluation of feature types and of the
//! category/feature-type association, plus scoring and agreement.

mod agreement;
mod io;

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use agreement::{fleiss_kappa, fleiss_kappa_null_se, score_accuracy, ResponseSet};
pub use io::{load_responses, load_tasks, save_key, save_responses, save_tasks};

use crate::error::{Error, Result};
use crate::math::argsort_desc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Coherence,
    Relevance,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Coherence => "coherence",
            TaskKind::Relevance => "relevance",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "coherence" => Some(TaskKind::Coherence),
            "relevance" => Some(TaskKind::Relevance),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntruderTask {
    pub task_id: String,
    pub kind: TaskKind,
    /// Words for coherence tasks; space-joined type words for relevance tasks.
    pub display_items: Vec<String>,
    /// 0-based position of the intruder in `display_items`.
    pub answer_index: usize,
    /// Member concepts of the category, for relevance tasks.
    pub context: Vec<String>,
}

impl IntruderTask {
    pub fn n_items(&self) -> usize {
        self.display_items.len()
    }

    pub fn intruder(&self) -> &str {
        &self.display_items[self.answer_index]
    }
}

fn shuffled_task<R: Rng>(
    rng: &mut R,
    task_id: String,
    kind: TaskKind,
    mut items: Vec<String>,
    intruder: String,
    context: Vec<String>,
) -> IntruderTask {
    items.push(intruder);
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(rng);
    let answer_index = order
        .iter()
        .position(|&i| i == items.len() - 1)
        .unwrap_or(0);
    IntruderTask {
        task_id,
        kind,
        display_items: order.into_iter().map(|i| items[i].clone()).collect(),
        answer_index,
        context,
    }
}

/// One task per feature type: its `top_n` words plus a random word from the
/// top `top_n` of another random type, excluding anything in the source
/// type's top `3 * top_n`. `type_words[g]` lists type `g`'s words best-first;
/// types with fewer than `top_n` words are skipped.
pub fn gen_coherence_tasks(
    type_words: &[Vec<String>],
    top_n: usize,
    seed: u64,
) -> Result<Vec<IntruderTask>> {
    if top_n == 0 {
        return Err(Error::InvalidParameter("top_n must be at least 1".into()));
    }
    let usable: Vec<usize> = (0..type_words.len())
        .filter(|&g| type_words[g].len() >= top_n)
        .collect();
    if usable.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "coherence tasks need at least 2 feature types with {top_n} words, found {}",
            usable.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tasks = Vec::new();
    for &g in &usable {
        let words = &type_words[g];
        let excluded: HashSet<&str> = words.iter().take(3 * top_n).map(String::as_str).collect();
        let mut others: Vec<usize> = usable.iter().copied().filter(|&h| h != g).collect();
        others.shuffle(&mut rng);
        let intruder = others.iter().find_map(|&h| {
            let pool: Vec<&String> = type_words[h]
                .iter()
                .take(top_n)
                .filter(|w| !excluded.contains(w.as_str()))
                .collect();
            pool.choose(&mut rng).map(|w| (*w).clone())
        });
        let Some(intruder) = intruder else {
            log::warn!("feature type {g}: no valid intruder word, skipped");
            continue;
        };
        let shown = words[..top_n].to_vec();
        tasks.push(shuffled_task(
            &mut rng,
            format!("coherence-{g}"),
            TaskKind::Coherence,
            shown,
            intruder,
            Vec::new(),
        ));
    }
    Ok(tasks)
}

/// A category as shown to annotators.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryView {
    pub id: usize,
    pub members: Vec<String>,
}

/// The candidate intruder types for a category: types with zero relevance if
/// any, otherwise the bottom quartile by relevance among types that have
/// words. Shown types are never candidates.
fn intruder_pool(relevance: &[f64], shown: &[usize], type_words: &[Vec<String>]) -> Vec<usize> {
    let active: Vec<usize> = (0..relevance.len())
        .filter(|&t| !type_words[t].is_empty())
        .collect();
    let candidates: Vec<usize> = active
        .iter()
        .copied()
        .filter(|t| !shown.contains(t))
        .collect();
    let zero: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&t| relevance[t] == 0.0)
        .collect();
    if !zero.is_empty() {
        return zero;
    }
    let weights: Vec<f64> = candidates.iter().map(|&t| relevance[t]).collect();
    let mut ascending = argsort_desc(&weights);
    ascending.reverse();
    ascending
        .into_iter()
        .take(active.len().div_ceil(4))
        .map(|i| candidates[i])
        .collect()
}

/// One task per category: its `types_shown - 1` most relevant types plus one
/// unrelated intruder type. Each type is rendered as its top `words_per_type`
/// words joined by spaces. `relevance[k][g]` is the association of category
/// `k` with type `g`.
pub fn gen_relevance_tasks(
    categories: &[CategoryView],
    relevance: &[Vec<f64>],
    type_words: &[Vec<String>],
    types_shown: usize,
    words_per_type: usize,
    seed: u64,
) -> Result<Vec<IntruderTask>> {
    if types_shown < 2 {
        return Err(Error::InvalidParameter(
            "types_shown must be at least 2".into(),
        ));
    }
    let render = |t: usize| {
        type_words[t]
            .iter()
            .take(words_per_type)
            .cloned()
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tasks = Vec::new();
    for cat in categories {
        let row = relevance.get(cat.id).ok_or(Error::OutOfRange {
            what: "category",
            id: cat.id,
            size: relevance.len(),
        })?;
        if row.len() != type_words.len() {
            return Err(Error::InvalidParameter(format!(
                "relevance row has {} types, type word lists have {}",
                row.len(),
                type_words.len()
            )));
        }
        let shown: Vec<usize> = argsort_desc(row)
            .into_iter()
            .filter(|&t| row[t] > 0.0 && !type_words[t].is_empty())
            .take(types_shown - 1)
            .collect();
        if shown.len() < types_shown - 1 {
            log::warn!(
                "category {}: only {} associated types, skipped",
                cat.id,
                shown.len()
            );
            continue;
        }
        let pool = intruder_pool(row, &shown, type_words);
        let Some(&intruder) = pool.choose(&mut rng) else {
            log::warn!("category {}: no valid intruder type, skipped", cat.id);
            continue;
        };
        tasks.push(shuffled_task(
            &mut rng,
            format!("relevance-{}", cat.id),
            TaskKind::Relevance,
            shown.into_iter().map(render).collect(),
            render(intruder),
            cat.members.clone(),
        ));
    }
    Ok(tasks)
}
