use anyhow::{bail, Result};
use bcf_core::corpus::{
    extract_stimuli, load_documents, load_lexicon, load_stopwords, save_stimuli, ExtractConfig,
};

use super::{ensure_exists, Global, STIMULI_FILE};
use crate::args::IngestArgs;
use crate::config::{pick, require};

pub fn cmd_ingest(global: &Global, args: &IngestArgs) -> Result<()> {
    let f = &global.file;
    let documents = require(&args.documents, &f.documents, "documents")?;
    let lexicon = require(&args.lexicon, &f.lexicon, "lexicon")?;
    ensure_exists(&documents, "documents")?;
    ensure_exists(&lexicon, "lexicon")?;
    let stopwords = match pick(&args.stopwords, &f.stopwords) {
        Some(p) => load_stopwords(&p)?,
        None => Default::default(),
    };
    let defaults = ExtractConfig::default();
    let config = ExtractConfig {
        tfidf_keep_fraction: pick(&args.keep_fraction, &f.keep_fraction)
            .unwrap_or(defaults.tfidf_keep_fraction),
        min_ctx: pick(&args.min_ctx, &f.min_ctx).unwrap_or(defaults.min_ctx),
        max_ctx: pick(&args.max_ctx, &f.max_ctx).unwrap_or(defaults.max_ctx),
        max_per_concept: pick(&args.max_per_concept, &f.max_per_concept)
            .unwrap_or(defaults.max_per_concept),
        stopwords,
        cap_sampling_seed: global.seed,
    };
    if !(config.tfidf_keep_fraction > 0.0 && config.tfidf_keep_fraction <= 1.0) {
        bail!(
            "keep fraction must be in (0, 1], got {}",
            config.tfidf_keep_fraction
        );
    }
    let docs = load_documents(&documents)?;
    let lexicon = load_lexicon(&lexicon)?;
    let set = extract_stimuli(&docs, &lexicon, &config)?;
    let out = global.out(STIMULI_FILE);
    save_stimuli(&set, &out)?;
    log::info!(
        "{} stimuli for {} concepts written to {}",
        set.len(),
        set.vocab().n_concepts(),
        out.display()
    );
    Ok(())
}
