use anyhow::{bail, Result};
use bcf_core::corpus::load_stimuli_with;
use bcf_core::corpus::StimulusBounds;
use bcf_core::eval::{
    predict_concept_assoc, predict_concept_bayescat, predict_concept_bcf, random_ranking,
    ranking_metrics, write_ranking_report, Prediction,
};
use bcf_core::fsutil::write_atomic;
use bcf_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ensure_exists, Global, RANKING_FILE, RANKS_FILE, TEST_FILE};
use crate::args::PredictArgs;
use crate::artifact::{ModelArtifact, ModelParams, MODEL_FILE};
use crate::config::{pick, require};

pub fn cmd_predict(global: &Global, args: &PredictArgs) -> Result<()> {
    let f = &global.file;
    let seed = global.seed()?;
    let model_dir = require(&args.model_dir, &f.model_dir, "model_dir")?;
    let model_path = model_dir.join(MODEL_FILE);
    ensure_exists(&model_path, "model file")?;
    let test_path = pick(&args.test, &f.test).unwrap_or_else(|| model_dir.join(TEST_FILE));
    ensure_exists(&test_path, "test stimuli")?;
    let artifact = ModelArtifact::load(&model_path)?;
    let vocab = artifact.vocabulary()?;
    // Held-out files may hold any length; the model does not care.
    let loose = StimulusBounds {
        min_ctx: 0,
        max_ctx: usize::MAX,
        max_per_concept: usize::MAX,
    };
    let test = load_stimuli_with(&test_path, loose)?;
    let unknown = vocab.n_features();
    let queries: Vec<(usize, usize, Vec<usize>)> = test
        .iter_named()
        .enumerate()
        .filter_map(|(i, st)| {
            let c = vocab.concept_id(&st.concept)?;
            let feats = st
                .features
                .iter()
                .map(|w| vocab.feature_id(w).unwrap_or(unknown))
                .collect();
            Some((i, c, feats))
        })
        .collect();
    let skipped_concepts = test.len() - queries.len();
    if skipped_concepts > 0 {
        log::warn!("{skipped_concepts} test stimuli name concepts the model never saw; skipped");
    }
    let assoc = artifact.assoc();
    let predictions: Vec<Option<Prediction>> = queries
        .par_iter()
        .map(|(_, _, feats)| {
            let p = match &artifact.params {
                ModelParams::Bcf { summary } => {
                    predict_concept_bcf(summary, &artifact.categories, feats)
                }
                ModelParams::Bayescat { model } => predict_concept_bayescat(model, feats),
                ModelParams::Cooc { .. } => Ok(predict_concept_assoc(
                    assoc.as_ref().expect("cooc model"),
                    feats,
                )),
                ModelParams::Random => Ok(Prediction {
                    ranking: Vec::new(),
                    scores: Vec::new(),
                    skipped: 0,
                }),
            };
            match p {
                Ok(p) => Ok(Some(p)),
                Err(Error::AllFeaturesUnknown) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<bcf_core::Result<_>>()?;

    let n_concepts = vocab.n_concepts();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let is_random = matches!(artifact.params, ModelParams::Random);
    let mut rows = Vec::new();
    let mut model_ranks = Vec::new();
    let mut random_ranks = Vec::new();
    for ((i, c, _), p) in queries.iter().zip(&predictions) {
        let Some(p) = p else { continue };
        let random_rank = random_ranking(&mut rng, n_concepts)
            .rank_of(*c)
            .expect("every concept is ranked");
        let model_rank = if is_random {
            random_rank
        } else {
            p.rank_of(*c).expect("every concept is ranked")
        };
        rows.push((*i, *c, model_rank, random_rank));
        model_ranks.push(model_rank);
        random_ranks.push(random_rank);
    }
    let dropped = queries.len() - rows.len();
    if dropped > 0 {
        log::warn!("{dropped} test stimuli have no known features; skipped");
    }
    if rows.is_empty() {
        bail!("no test stimulus could be scored");
    }
    let mut report = vec![(
        artifact.params.name().to_owned(),
        ranking_metrics(model_ranks, n_concepts)?,
    )];
    if !is_random {
        report.push((
            "random".to_owned(),
            ranking_metrics(random_ranks, n_concepts)?,
        ));
    }
    write_ranking_report(&report, &global.out(RANKING_FILE))?;
    write_atomic(&global.out(RANKS_FILE), |w| {
        writeln!(w, "stimulus\tconcept\trank\trandom_rank")?;
        for &(i, c, r, rr) in &rows {
            writeln!(w, "{i}\t{}\t{r}\t{rr}", vocab.concept_name(c))?;
        }
        Ok(())
    })?;
    for (name, r) in &report {
        println!(
            "{name}\tpr@1 {:.3}\tpr@10 {:.3}\tpr@20 {:.3}\tavg rank {:.3}",
            r.precision_at_1, r.precision_at_10, r.precision_at_20, r.mean_rank
        );
    }
    Ok(())
}
