use crate::corpus::StimulusSet;

/// Concept x feature co-occurrence counts with a minimum-count cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct AssocMatrix {
    n_concepts: usize,
    n_features: usize,
    values: Vec<f64>,
    min_count: u32,
}

impl AssocMatrix {
    pub fn from_dense(
        n_concepts: usize,
        n_features: usize,
        values: Vec<f64>,
        min_count: u32,
    ) -> Self {
        assert_eq!(
            values.len(),
            n_concepts * n_features,
            "dense matrix has the wrong size"
        );
        AssocMatrix {
            n_concepts,
            n_features,
            values,
            min_count,
        }
    }

    pub fn n_concepts(&self) -> usize {
        self.n_concepts
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn min_count(&self) -> u32 {
        self.min_count
    }

    pub fn get(&self, concept: usize, feature: usize) -> f64 {
        self.values[concept * self.n_features + feature]
    }

    pub fn row(&self, concept: usize) -> &[f64] {
        &self.values[concept * self.n_features..(concept + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values
            .chunks(self.n_features.max(1))
            .take(self.n_concepts)
    }
}

/// Counts how often each concept co-occurs with each feature across stimuli
/// (every token counts) and zeroes entries below `min_count`.
pub fn build_assoc(stimuli: &StimulusSet, min_count: u32) -> AssocMatrix {
    let (l, v) = (stimuli.vocab().n_concepts(), stimuli.vocab().n_features());
    let mut counts = vec![0u32; l * v];
    for s in stimuli.stimuli() {
        for &f in &s.features {
            counts[s.concept * v + f] += 1;
        }
    }
    let values = counts
        .into_iter()
        .map(|n| if n < min_count { 0.0 } else { f64::from(n) })
        .collect();
    AssocMatrix::from_dense(l, v, values, min_count)
}
