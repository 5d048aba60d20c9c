use anyhow::{bail, Result};
use bcf_core::intruder::{
    gen_coherence_tasks, gen_relevance_tasks, save_key, save_tasks, CategoryView,
};
use bcf_core::sampler::chain_seeds;

use super::{ensure_exists, Global};
use crate::args::TasksArgs;
use crate::artifact::{ModelArtifact, MODEL_FILE};
use crate::config::{pick, require};

pub fn cmd_tasks(global: &Global, args: &TasksArgs) -> Result<()> {
    let f = &global.file;
    let seed = global.seed()?;
    let model_dir = require(&args.model_dir, &f.model_dir, "model_dir")?;
    let model_path = model_dir.join(MODEL_FILE);
    ensure_exists(&model_path, "model file")?;
    let top_n = pick(&args.top_n, &f.top_n).unwrap_or(5);
    let types_shown = pick(&args.types_shown, &f.types_shown).unwrap_or(6);
    let words_per_type = pick(&args.words_per_type, &f.words_per_type).unwrap_or(5);
    let artifact = ModelArtifact::load(&model_path)?;
    if artifact.type_words.is_empty() {
        bail!(
            "a {} model has no feature types to build tasks from",
            artifact.params.name()
        );
    }
    let seeds = chain_seeds(seed, 2);
    let coherence = gen_coherence_tasks(&artifact.type_words, top_n, seeds[0])?;
    let mut members = vec![Vec::new(); artifact.n_categories];
    for (c, &k) in artifact.categories.iter().enumerate() {
        members[k].push(artifact.concepts[c].clone());
    }
    let categories: Vec<CategoryView> = members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(id, members)| CategoryView { id, members })
        .collect();
    let relevance = gen_relevance_tasks(
        &categories,
        &artifact.relevance,
        &artifact.type_words,
        types_shown,
        words_per_type,
        seeds[1],
    )?;
    save_tasks(&coherence, &global.out("coherence_tasks.csv"))?;
    save_key(&coherence, &global.out("coherence_key.csv"))?;
    save_tasks(&relevance, &global.out("relevance_tasks.csv"))?;
    save_key(&relevance, &global.out("relevance_key.csv"))?;
    println!(
        "{} coherence and {} relevance tasks written to {}",
        coherence.len(),
        relevance.len(),
        global.out_dir.display()
    );
    Ok(())
}
