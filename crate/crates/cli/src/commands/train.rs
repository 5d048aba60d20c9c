use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bcf_core::baselines::{
    bayescat_feature_types, bayescat_hard_assign, bayescat_train, build_assoc, cooc_categorize,
    cooc_feature_types, random_categorize, save_relevance_tsv, BayesCatParams,
};
use bcf_core::corpus::{load_stimuli, save_stimuli};
use bcf_core::fsutil::write_atomic;
use bcf_core::math::argsort_desc;
use bcf_core::sampler::{
    chain_seeds, read_trace, write_trace, ChainConfig, ChainRun, Checkpoint, Hyperparams,
    Observations,
};
use bcf_core::{Categorization, StimulusSet, Vocabulary};
use rayon::prelude::*;

use super::{ensure_exists, Global, CATEGORIES_FILE, TEST_FILE, TRAIN_FILE};
use crate::args::TrainArgs;
use crate::artifact::{ModelArtifact, ModelParams, MODEL_FILE};
use crate::config::{pick, require};

/// Words kept per feature type in the model file.
const TYPE_WORDS: usize = 30;

/// A trained model plus its full `(type, feature)` membership.
type Trained = (ModelArtifact, BTreeSet<(usize, usize)>);

struct Settings {
    model: String,
    seed: u64,
    hyper: Hyperparams,
    chain: ChainConfig,
    chains: usize,
    checkpoint_every: u64,
    resume: bool,
    min_count: u32,
    types_per_category: usize,
}

fn settings(global: &Global, args: &TrainArgs) -> Result<Settings> {
    let f = &global.file;
    let model = pick(&args.model, &f.model).unwrap_or_else(|| "bcf".into());
    if !["bcf", "bayescat", "cooc", "random"].contains(&model.as_str()) {
        bail!("unknown model {model:?} (expected bcf, bayescat, cooc or random)");
    }
    let mut hyper = Hyperparams::new(
        pick(&args.k, &f.k).unwrap_or(40),
        pick(&args.g, &f.g).unwrap_or(50),
    );
    hyper.alpha = pick(&args.alpha, &f.alpha).unwrap_or(hyper.alpha);
    hyper.beta = pick(&args.beta, &f.beta).unwrap_or(hyper.beta);
    hyper.gamma = pick(&args.gamma, &f.gamma).unwrap_or(hyper.gamma);
    hyper.validate()?;
    let defaults = ChainConfig::default();
    let chain = ChainConfig {
        sweeps: pick(&args.sweeps, &f.sweeps).unwrap_or(defaults.sweeps),
        early_stop: args.early_stop || f.early_stop.unwrap_or(false),
        window: pick(&args.window, &f.window).unwrap_or(defaults.window),
        tolerance: pick(&args.tolerance, &f.tolerance).unwrap_or(defaults.tolerance),
    };
    if chain.early_stop && chain.window == 0 {
        bail!("early-stop window must be at least 1");
    }
    let chains = pick(&args.chains, &f.chains).unwrap_or(10);
    if chains == 0 {
        bail!("at least one chain is required");
    }
    let types_per_category = pick(&args.types_per_category, &f.types_per_category).unwrap_or(5);
    if types_per_category == 0 {
        bail!("types per category must be at least 1");
    }
    Ok(Settings {
        model,
        seed: global.seed()?,
        hyper,
        chain,
        chains,
        checkpoint_every: pick(&args.checkpoint_every, &f.checkpoint_every).unwrap_or(0),
        resume: args.resume || f.resume.unwrap_or(false),
        min_count: pick(&args.min_count, &f.min_count).unwrap_or(2),
        types_per_category,
    })
}

pub fn cmd_train(global: &Global, args: &TrainArgs) -> Result<()> {
    let f = &global.file;
    let s = settings(global, args)?;
    let stimuli = require(&args.stimuli, &f.stimuli, "stimuli")?;
    ensure_exists(&stimuli, "stimulus file")?;
    let test_size = pick(&args.test_size, &f.test_size).unwrap_or(300);
    let all = load_stimuli(&stimuli)?;
    let (train, test) = all.split(test_size, s.seed)?;
    if s.model == "random" || s.model == "cooc" {
        let n = train.vocab().n_concepts();
        if s.hyper.k > n {
            bail!("K = {} exceeds the {n} training concepts", s.hyper.k);
        }
    }
    save_stimuli(&train, &global.out(TRAIN_FILE))?;
    if let Some(test) = &test {
        save_stimuli(test, &global.out(TEST_FILE))?;
    }
    let (artifact, memberships) = match s.model.as_str() {
        "bcf" => train_bcf(global, &s, &train)?,
        "bayescat" => train_bayescat(&s, &train)?,
        "cooc" => train_cooc(&s, &train)?,
        _ => train_random(&s, &train)?,
    };
    write_outputs(global, &artifact, &memberships, train.vocab())?;
    log::info!("{} model written to {}", s.model, global.out_dir.display());
    Ok(())
}

fn chain_paths(global: &Global, i: usize) -> (PathBuf, PathBuf) {
    (
        global.out(&format!("chain-{i}.ckpt")),
        global.out(&format!("chain-{i}.trace.csv")),
    )
}

fn run_one_chain(
    global: &Global,
    s: &Settings,
    obs: &Observations,
    vocab: &Vocabulary,
    i: usize,
    seed: u64,
) -> Result<ChainRun> {
    let (ckpt_path, trace_path) = chain_paths(global, i);
    let (mut run, history) = if s.resume && ckpt_path.exists() {
        let ckpt = Checkpoint::load(&ckpt_path)?;
        if ckpt.hyper() != s.hyper {
            bail!(
                "{}: checkpoint hyperparameters differ from this run",
                ckpt_path.display()
            );
        }
        let run = ckpt
            .restore(obs, vocab)
            .with_context(|| format!("restoring {}", ckpt_path.display()))?;
        let start = run.state.sweeps();
        let history = if trace_path.exists() {
            read_trace(&trace_path)?
                .into_iter()
                .filter(|t| t.sweep < start)
                .collect()
        } else {
            Vec::new()
        };
        log::info!("chain {i}: resuming at sweep {start}");
        (run, history)
    } else {
        (ChainRun::start(obs, s.hyper, seed)?, Vec::new())
    };
    let save = |run: &ChainRun, history: &[bcf_core::sampler::TracePoint]| -> Result<()> {
        Checkpoint::from_run(run, vocab)?.save(&ckpt_path)?;
        let full: Vec<_> = history.iter().chain(&run.trace).copied().collect();
        write_trace(&trace_path, &full)?;
        Ok(())
    };
    let mut remaining = s.chain.sweeps.saturating_sub(run.state.sweeps());
    while remaining > 0 && !run.stopped_early {
        let step = if s.checkpoint_every == 0 {
            remaining
        } else {
            s.checkpoint_every.min(remaining)
        };
        run.advance(
            obs,
            &ChainConfig {
                sweeps: step,
                ..s.chain
            },
        )?;
        remaining -= step;
        save(&run, &history)?;
    }
    save(&run, &history)?;
    Ok(run)
}

fn train_bcf(global: &Global, s: &Settings, train: &StimulusSet) -> Result<Trained> {
    let obs = Observations::from_set(train);
    let vocab = train.vocab();
    let seeds = chain_seeds(s.seed, s.chains);
    let runs: Vec<ChainRun> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| run_one_chain(global, s, &obs, vocab, i, seed))
        .collect::<Result<_>>()?;
    let mut chosen = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.best.log_joint > runs[chosen].best.log_joint {
            chosen = i;
        }
    }
    write_atomic(&global.out("summary.tsv"), |w| {
        writeln!(
            w,
            "chain\tseed\tsweeps\tbest_sweep\tbest_log_joint\tselected"
        )?;
        for (i, (r, seed)) in runs.iter().zip(&seeds).enumerate() {
            writeln!(
                w,
                "{i}\t{seed}\t{}\t{}\t{:.3}\t{}",
                r.state.sweeps(),
                r.best.sweep,
                r.best.log_joint,
                u8::from(i == chosen)
            )?;
        }
        let mean = runs.iter().map(|r| r.best.log_joint).sum::<f64>() / runs.len() as f64;
        writeln!(w, "mean\t-\t-\t-\t{mean:.3}\t-")?;
        Ok(())
    })?;
    let best = runs[chosen].best.to_state(&obs, s.hyper, seeds[chosen])?;
    let summary = best.posterior_means()?;
    let counts = best.counts();
    let (g, v) = (s.hyper.g, vocab.n_features());
    let type_words = (0..g)
        .map(|t| {
            if counts.n_ft_total[t] == 0 {
                return Vec::new();
            }
            argsort_desc(&summary.phi[t])
                .into_iter()
                .filter(|&f| counts.n_ft_feat[t * v + f] > 0)
                .take(TYPE_WORDS)
                .map(|f| vocab.feature_name(f).to_owned())
                .collect()
        })
        .collect();
    // Each feature belongs to the type that emitted most of its tokens.
    let memberships = (0..v)
        .filter_map(|f| {
            let per_type: Vec<f64> = (0..g)
                .map(|t| f64::from(counts.n_ft_feat[t * v + f]))
                .collect();
            let t = bcf_core::math::argmax(&per_type);
            (per_type[t] > 0.0).then_some((t, f))
        })
        .collect();
    let relevance = summary.mu.clone();
    let artifact = ModelArtifact::new(
        vocab,
        best.k_assign().to_vec(),
        s.hyper.k,
        type_words,
        relevance,
        ModelParams::Bcf { summary },
    );
    Ok((artifact, memberships))
}

fn train_bayescat(s: &Settings, train: &StimulusSet) -> Result<Trained> {
    let obs = Observations::from_set(train);
    let vocab = train.vocab();
    let params = BayesCatParams {
        k: s.hyper.k,
        alpha: s.hyper.alpha,
        beta: s.hyper.beta,
        gamma: s.hyper.gamma,
    };
    let seeds = chain_seeds(s.seed, s.chains);
    let fits = seeds
        .par_iter()
        .map(|&seed| bayescat_train(&obs, params, seed, s.chain.sweeps))
        .collect::<bcf_core::Result<Vec<_>>>()?;
    let mut chosen = 0;
    for (i, fit) in fits.iter().enumerate() {
        if fit.1 > fits[chosen].1 {
            chosen = i;
        }
    }
    let model = fits
        .into_iter()
        .nth(chosen)
        .map(|f| f.0)
        .unwrap_or_else(|| unreachable!());
    let g = s.hyper.g.min(vocab.n_features());
    let types = bayescat_feature_types(&model, g, s.seed)?;
    let marginal: Vec<f64> = (0..vocab.n_features())
        .map(|f| {
            (0..model.n_categories())
                .map(|z| model.p_f_given_z[z][f] * model.p_z[z])
                .sum()
        })
        .collect();
    let type_words = types
        .members()
        .into_iter()
        .map(|members| rank_names(vocab, &members, &marginal))
        .collect();
    let categories = bayescat_hard_assign(&model)?;
    let memberships = types.assignment.iter().map(|(&f, &t)| (t, f)).collect();
    let artifact = ModelArtifact::new(
        vocab,
        categories.labels().to_vec(),
        s.hyper.k,
        type_words,
        types.relevance,
        ModelParams::Bayescat { model },
    );
    Ok((artifact, memberships))
}

/// Names of `members` ordered by `weight` descending, ties to lower ids.
fn rank_names(vocab: &Vocabulary, members: &[usize], weight: &[f64]) -> Vec<String> {
    let w: Vec<f64> = members.iter().map(|&f| weight[f]).collect();
    argsort_desc(&w)
        .into_iter()
        .take(TYPE_WORDS)
        .map(|i| vocab.feature_name(members[i]).to_owned())
        .collect()
}

fn train_cooc(s: &Settings, train: &StimulusSet) -> Result<Trained> {
    let vocab = train.vocab();
    let assoc = build_assoc(train, s.min_count);
    let categories = cooc_categorize(&assoc, s.hyper.k, s.seed)?;
    let clusterings = cooc_feature_types(&assoc, &categories, s.types_per_category, s.seed)?;
    let members = categories.members();
    let n_types = s.hyper.k * s.types_per_category;
    let mut relevance = vec![vec![0.0; n_types]; s.hyper.k];
    let mut type_words = vec![Vec::new(); n_types];
    let mut memberships = BTreeSet::new();
    for (z, clustering) in clusterings.iter().enumerate() {
        memberships.extend(clustering.assignment.iter().map(|(&f, &t)| (t, f)));
        for (row, add) in relevance.iter_mut().zip(&clustering.relevance) {
            for (r, a) in row.iter_mut().zip(add) {
                *r += a;
            }
        }
        let mass: Vec<f64> = (0..vocab.n_features())
            .map(|f| members[z].iter().map(|&c| assoc.get(c, f)).sum())
            .collect();
        for (t, feats) in clustering.members().into_iter().enumerate() {
            if !feats.is_empty() {
                type_words[t] = rank_names(vocab, &feats, &mass);
            }
        }
    }
    let values = assoc.rows().flatten().copied().collect();
    let artifact = ModelArtifact::new(
        vocab,
        categories.labels().to_vec(),
        s.hyper.k,
        type_words,
        relevance,
        ModelParams::Cooc {
            min_count: s.min_count,
            values,
        },
    );
    Ok((artifact, memberships))
}

fn train_random(s: &Settings, train: &StimulusSet) -> Result<Trained> {
    let vocab = train.vocab();
    let categories = random_categorize(vocab.n_concepts(), s.hyper.k, s.seed)?;
    let artifact = ModelArtifact::new(
        vocab,
        categories.labels().to_vec(),
        s.hyper.k,
        Vec::new(),
        Vec::new(),
        ModelParams::Random,
    );
    Ok((artifact, BTreeSet::new()))
}

fn write_outputs(
    global: &Global,
    artifact: &ModelArtifact,
    memberships: &BTreeSet<(usize, usize)>,
    vocab: &Vocabulary,
) -> Result<()> {
    let categories = Categorization::new(artifact.categories.clone(), artifact.n_categories)?;
    categories.save_tsv(vocab, &global.out(CATEGORIES_FILE))?;
    if !artifact.type_words.is_empty() {
        write_atomic(&global.out("type_words.tsv"), |w| {
            writeln!(w, "type\trank\tword")?;
            for (t, words) in artifact.type_words.iter().enumerate() {
                for (r, word) in words.iter().enumerate() {
                    writeln!(w, "{t}\t{}\t{word}", r + 1)?;
                }
            }
            Ok(())
        })?;
        write_atomic(&global.out("feature_types.tsv"), |w| {
            writeln!(w, "feature\ttype")?;
            for &(t, f) in memberships {
                writeln!(w, "{}\t{t}", vocab.feature_name(f))?;
            }
            Ok(())
        })?;
        save_relevance_tsv(&artifact.relevance, &global.out("relevance.tsv"))?;
    }
    artifact.save(&global.out(MODEL_FILE))
}
