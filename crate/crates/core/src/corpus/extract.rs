use std::collections::{HashMap, HashSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{compute_tfidf, NamedStimulus, StimulusBounds, StimulusSet, TokenizedDocument};
use crate::error::{Error, Result};

/// Concept surface forms; multi-word forms match contiguous token runs.
#[derive(Debug, Clone)]
pub struct ConceptLexicon {
    names: Vec<String>,
    forms: Vec<Vec<String>>,
    /// First token -> candidate entries, longest form first.
    by_first: HashMap<String, Vec<usize>>,
}

impl ConceptLexicon {
    pub fn new<I, S>(surface_forms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut names = Vec::new();
        let mut forms = Vec::new();
        let mut seen = HashSet::new();
        for s in surface_forms {
            let tokens: Vec<String> = s
                .as_ref()
                .split_whitespace()
                .map(str::to_lowercase)
                .collect();
            if tokens.is_empty() {
                continue;
            }
            let name = tokens.join(" ");
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate concept {name:?} in lexicon"
                )));
            }
            names.push(name);
            forms.push(tokens);
        }
        if names.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        let mut by_first: HashMap<String, Vec<usize>> = HashMap::new();
        for (id, f) in forms.iter().enumerate() {
            by_first.entry(f[0].clone()).or_default().push(id);
        }
        for ids in by_first.values_mut() {
            ids.sort_by(|&a, &b| forms[b].len().cmp(&forms[a].len()).then(a.cmp(&b)));
        }
        Ok(ConceptLexicon {
            names,
            forms,
            by_first,
        })
    }

    /// Number of concept types.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn id(&self, surface: &str) -> Option<usize> {
        self.names.iter().position(|n| n == surface)
    }

    /// Non-overlapping mentions `(concept, start, len)`, scanning left to
    /// right and preferring the longest form at each position.
    pub fn find_mentions(&self, sentence: &[String]) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < sentence.len() {
            let hit = self.by_first.get(&sentence[i]).and_then(|ids| {
                ids.iter().copied().find(|&id| {
                    let f = &self.forms[id];
                    sentence.len() - i >= f.len() && sentence[i..i + f.len()] == f[..]
                })
            });
            match hit {
                Some(id) => {
                    let len = self.forms[id].len();
                    out.push((id, i, len));
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ExtractConfig {
    /// Fraction of a stimulus' context words kept after tf-idf ranking.
    pub tfidf_keep_fraction: f64,
    pub min_ctx: usize,
    pub max_ctx: usize,
    pub max_per_concept: usize,
    pub stopwords: HashSet<String>,
    /// When set, the per-concept cap keeps a seeded random subset instead of
    /// the earliest stimuli.
    pub cap_sampling_seed: Option<u64>,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            tfidf_keep_fraction: 0.5,
            min_ctx: 3,
            max_ctx: 20,
            max_per_concept: 1000,
            stopwords: HashSet::new(),
            cap_sampling_seed: None,
        }
    }
}

impl ExtractConfig {
    fn bounds(&self) -> StimulusBounds {
        StimulusBounds {
            min_ctx: self.min_ctx,
            max_ctx: self.max_ctx,
            max_per_concept: self.max_per_concept,
        }
    }
}

struct Candidate {
    concept: usize,
    features: Vec<String>,
    source: (String, usize),
}

pub fn extract_stimuli(
    documents: &[TokenizedDocument],
    lexicon: &ConceptLexicon,
    config: &ExtractConfig,
) -> Result<StimulusSet> {
    if lexicon.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    if !(config.tfidf_keep_fraction > 0.0 && config.tfidf_keep_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tfidf_keep_fraction must be in (0, 1], got {}",
            config.tfidf_keep_fraction
        )));
    }
    if config.min_ctx > config.max_ctx || config.max_per_concept == 0 {
        return Err(Error::InvalidParameter(format!(
            "invalid context bounds min={} max={} cap={}",
            config.min_ctx, config.max_ctx, config.max_per_concept
        )));
    }
    let tfidf = compute_tfidf(documents)?;

    let per_doc: Vec<Vec<Candidate>> = documents
        .par_iter()
        .enumerate()
        .map(|(d, doc)| doc_candidates(doc, tfidf.doc_scores(d), lexicon, config))
        .collect();

    // Deterministic merge: document order, then sentence order, then mention order.
    let candidates: Vec<Candidate> = per_doc.into_iter().flatten().collect();
    let mut totals = vec![0usize; lexicon.len()];
    for cand in &candidates {
        totals[cand.concept] += 1;
    }
    let masks: Vec<Vec<bool>> = totals
        .iter()
        .enumerate()
        .map(|(c, &n)| {
            if n > config.max_per_concept {
                log::debug!(
                    "concept {:?}: {n} candidate stimuli capped to {}",
                    lexicon.name(c),
                    config.max_per_concept
                );
            }
            capped_mask(n, config, c)
        })
        .collect();
    let mut seen = vec![0usize; lexicon.len()];
    let records = candidates.into_iter().filter_map(|cand| {
        let c = cand.concept;
        let j = seen[c];
        seen[c] += 1;
        masks[c][j].then(|| NamedStimulus {
            concept: lexicon.name(c).to_owned(),
            features: cand.features,
            source: Some(cand.source),
        })
    });
    StimulusSet::from_named(records, config.bounds())
}

fn capped_mask(n: usize, config: &ExtractConfig, concept: usize) -> Vec<bool> {
    let cap = config.max_per_concept;
    if n <= cap {
        return vec![true; n];
    }
    match config.cap_sampling_seed {
        None => (0..n).map(|i| i < cap).collect(),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ (concept as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            );
            let mut mask = vec![false; n];
            for i in sample(&mut rng, n, cap) {
                mask[i] = true;
            }
            mask
        }
    }
}

fn doc_candidates(
    doc: &TokenizedDocument,
    scores: &HashMap<String, f64>,
    lexicon: &ConceptLexicon,
    config: &ExtractConfig,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (s_idx, sentence) in doc.sentences.iter().enumerate() {
        for (concept, start, len) in lexicon.find_mentions(sentence) {
            let positions: Vec<usize> = (0..sentence.len())
                .filter(|&p| {
                    (p < start || p >= start + len) && !config.stopwords.contains(&sentence[p])
                })
                .collect();
            if positions.len() < config.min_ctx {
                continue;
            }
            let mut ranked = positions.clone();
            // Highest tf-idf first; earlier position wins ties.
            ranked.sort_by(|&a, &b| {
                let sa = scores.get(&sentence[a]).copied().unwrap_or(0.0);
                let sb = scores.get(&sentence[b]).copied().unwrap_or(0.0);
                sb.total_cmp(&sa).then(a.cmp(&b))
            });
            let keep = ((positions.len() as f64 * config.tfidf_keep_fraction).ceil() as usize)
                .min(config.max_ctx)
                .min(positions.len());
            if keep < config.min_ctx {
                continue;
            }
            let mut kept = ranked[..keep].to_vec();
            kept.sort_unstable();
            out.push(Candidate {
                concept,
                features: kept.into_iter().map(|p| sentence[p].clone()).collect(),
                source: (doc.doc_id.clone(), s_idx),
            });
        }
    }
    out
}
