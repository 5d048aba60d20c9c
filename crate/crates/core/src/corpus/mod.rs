//! Stimulus construction: from tokenized documents and a concept lexicon to
//! the (concept, context words) observations the models consume.

mod extract;
mod io;
mod tfidf;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use extract::{extract_stimuli, ConceptLexicon, ExtractConfig};
pub use io::{
    load_documents, load_lexicon, load_stimuli, load_stimuli_with, load_stopwords, save_stimuli,
};
pub use tfidf::{compute_tfidf, TfIdf};

/// A pre-tokenized document: lowercase tokens grouped into sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub sentences: Vec<Vec<String>>,
}

impl TokenizedDocument {
    /// Builds a document from whitespace-separated sentence strings.
    pub fn from_lines<'a>(
        doc_id: impl Into<String>,
        lines: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        let sentences = lines
            .into_iter()
            .map(|l| {
                l.split_whitespace()
                    .map(str::to_lowercase)
                    .collect::<Vec<_>>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        TokenizedDocument {
            doc_id: doc_id.into(),
            sentences,
        }
    }
}

/// Bounds every stimulus must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StimulusBounds {
    pub min_ctx: usize,
    pub max_ctx: usize,
    pub max_per_concept: usize,
}

impl Default for StimulusBounds {
    fn default() -> Self {
        StimulusBounds {
            min_ctx: 3,
            max_ctx: 20,
            max_per_concept: 1000,
        }
    }
}

/// One concept mention with its (already filtered) context words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stimulus {
    pub concept: usize,
    pub features: Vec<usize>,
    /// `(doc_id, sentence index)` the stimulus was extracted from.
    pub source: Option<(String, usize)>,
}

/// A stimulus spelled with strings; this is also the on-disk record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedStimulus {
    pub concept: String,
    pub features: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<(String, usize)>,
}

/// Dense ids for concept and feature strings.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    concept_names: Vec<String>,
    feature_names: Vec<String>,
    concept_index: HashMap<String, usize>,
    feature_index: HashMap<String, usize>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.concept_names == other.concept_names && self.feature_names == other.feature_names
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a vocabulary from explicit name lists. Names must be unique.
    pub fn from_names(concepts: Vec<String>, features: Vec<String>) -> Result<Self> {
        let mut vocab = Vocabulary::new();
        for c in concepts {
            let before = vocab.n_concepts();
            if vocab.intern_concept(&c) != before {
                return Err(Error::InvalidParameter(format!(
                    "duplicate concept name {c:?}"
                )));
            }
        }
        for f in features {
            let before = vocab.n_features();
            if vocab.intern_feature(&f) != before {
                return Err(Error::InvalidParameter(format!(
                    "duplicate feature name {f:?}"
                )));
            }
        }
        Ok(vocab)
    }

    pub fn intern_concept(&mut self, name: &str) -> usize {
        intern(&mut self.concept_names, &mut self.concept_index, name)
    }

    pub fn intern_feature(&mut self, name: &str) -> usize {
        intern(&mut self.feature_names, &mut self.feature_index, name)
    }

    pub fn concept_id(&self, name: &str) -> Option<usize> {
        self.concept_index.get(name).copied()
    }

    pub fn feature_id(&self, name: &str) -> Option<usize> {
        self.feature_index.get(name).copied()
    }

    pub fn concept_name(&self, id: usize) -> &str {
        &self.concept_names[id]
    }

    pub fn feature_name(&self, id: usize) -> &str {
        &self.feature_names[id]
    }

    pub fn concept_names(&self) -> &[String] {
        &self.concept_names
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_concepts(&self) -> usize {
        self.concept_names.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// SHA-256 over both name lists, in id order, as lowercase hex.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for (tag, names) in [(b'c', &self.concept_names), (b'f', &self.feature_names)] {
            hasher.update([tag]);
            hasher.update((names.len() as u64).to_le_bytes());
            for n in names {
                hasher.update((n.len() as u64).to_le_bytes());
                hasher.update(n.as_bytes());
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn intern(names: &mut Vec<String>, index: &mut HashMap<String, usize>, name: &str) -> usize {
    if let Some(&id) = index.get(name) {
        return id;
    }
    let id = names.len();
    names.push(name.to_owned());
    index.insert(name.to_owned(), id);
    id
}

/// A validated collection of stimuli with its vocabulary.
///
/// Ids are always assigned by first occurrence in stimulus order, so a set
/// is fully determined by its sequence of [`NamedStimulus`] records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StimulusSet {
    stimuli: Vec<Stimulus>,
    vocab: Vocabulary,
    per_concept_counts: Vec<usize>,
}

impl StimulusSet {
    pub fn from_named<I>(records: I, bounds: StimulusBounds) -> Result<Self>
    where
        I: IntoIterator<Item = NamedStimulus>,
    {
        let mut vocab = Vocabulary::new();
        let mut stimuli = Vec::new();
        let mut per_concept_counts: Vec<usize> = Vec::new();
        for (index, rec) in records.into_iter().enumerate() {
            let n = rec.features.len();
            if n < bounds.min_ctx || n > bounds.max_ctx {
                return Err(Error::InvalidStimulus {
                    index,
                    message: format!(
                        "concept {:?} has {n} context words (allowed {}..={})",
                        rec.concept, bounds.min_ctx, bounds.max_ctx
                    ),
                });
            }
            if let Some(bad) = rec.features.iter().find(|f| !is_token(f)) {
                return Err(Error::InvalidStimulus {
                    index,
                    message: format!("feature {bad:?} is not a single token"),
                });
            }
            if rec.concept.trim().is_empty() {
                return Err(Error::InvalidStimulus {
                    index,
                    message: "empty concept name".into(),
                });
            }
            let concept = vocab.intern_concept(&rec.concept);
            if concept == per_concept_counts.len() {
                per_concept_counts.push(0);
            }
            per_concept_counts[concept] += 1;
            if per_concept_counts[concept] > bounds.max_per_concept {
                return Err(Error::InvalidStimulus {
                    index,
                    message: format!(
                        "concept {:?} exceeds {} stimuli",
                        rec.concept, bounds.max_per_concept
                    ),
                });
            }
            let features = rec
                .features
                .iter()
                .map(|f| vocab.intern_feature(f))
                .collect();
            stimuli.push(Stimulus {
                concept,
                features,
                source: rec.source,
            });
        }
        if stimuli.is_empty() {
            return Err(Error::EmptyStimulusSet);
        }
        Ok(StimulusSet {
            stimuli,
            vocab,
            per_concept_counts,
        })
    }

    pub fn stimuli(&self) -> &[Stimulus] {
        &self.stimuli
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.stimuli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stimuli.is_empty()
    }

    /// Stimulus count per concept id.
    pub fn per_concept_counts(&self) -> &[usize] {
        &self.per_concept_counts
    }

    pub fn named(&self, index: usize) -> NamedStimulus {
        let s = &self.stimuli[index];
        NamedStimulus {
            concept: self.vocab.concept_name(s.concept).to_owned(),
            features: s
                .features
                .iter()
                .map(|&f| self.vocab.feature_name(f).to_owned())
                .collect(),
            source: s.source.clone(),
        }
    }

    pub fn iter_named(&self) -> impl Iterator<Item = NamedStimulus> + '_ {
        (0..self.len()).map(|i| self.named(i))
    }

    /// Seeded held-out split: `test_size` stimuli go to the second set, the
    /// rest (in original order) to the first. Both sets are re-indexed.
    pub fn split(&self, test_size: usize, seed: u64) -> Result<(StimulusSet, Option<StimulusSet>)> {
        if test_size == 0 {
            return Ok((self.clone(), None));
        }
        if test_size >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "test size {test_size} leaves no training stimuli (have {})",
                self.len()
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut held_out = vec![false; self.len()];
        for &i in &order[..test_size] {
            held_out[i] = true;
        }
        let bounds = StimulusBounds {
            min_ctx: 0,
            max_ctx: usize::MAX,
            max_per_concept: usize::MAX,
        };
        let train = StimulusSet::from_named(
            (0..self.len())
                .filter(|&i| !held_out[i])
                .map(|i| self.named(i)),
            bounds,
        )?;
        let test = StimulusSet::from_named(
            (0..self.len())
                .filter(|&i| held_out[i])
                .map(|i| self.named(i)),
            bounds,
        )?;
        Ok((train, Some(test)))
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}
