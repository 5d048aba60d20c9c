//! One test per acceptance criterion. Each prints a single `PASS`/`FAIL`
//! line with the measured value before asserting.
//!
//! Three criteria cannot be met by a faithful implementation. Their strict
//! versions are `#[ignore]`d (run them with `--ignored`), and
//! `known_unattainable_report` prints their FAIL lines in every default run.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::time::{Duration, Instant};

use bcf_core::baselines::random_categorize;
use bcf_core::eval::{
    collocation, contingency, evaluate, f_beta, predict_concept_bcf, purity, random_ranking,
    ranking_metrics, v_measure, ContingencyTable, GoldStandard,
};
use bcf_core::intruder::{
    fleiss_kappa, fleiss_kappa_null_se, gen_coherence_tasks, gen_relevance_tasks, load_responses,
    load_tasks, save_key, save_responses, save_tasks, score_accuracy, CategoryView, IntruderTask,
    ResponseSet,
};
use bcf_core::sampler::{
    generate_from_params, generate_synthetic, run_chain, ChainConfig, CountTables, Hyperparams,
    ModelState, Observations, SyntheticConfig, SyntheticTruth, TrueParams,
};
use bcf_core::{Categorization, StimulusSet};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, pass: bool, detail: &str) -> bool {
    // Straight to the handle so the line survives libtest's output capture.
    let line = format!("[{}] {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::Write::write_all(&mut std::io::stderr(), line.as_bytes()).unwrap();
    pass
}

// ---------------------------------------------------------------------------
// Independent collapsed-joint oracle: Dirichlet-multinomial marginals written
// as products of rising factorials, no log-gamma.

fn ln_rising(x: f64, n: u64) -> f64 {
    (0..n).map(|t| (x + t as f64).ln()).sum()
}

fn dirmult(counts: &[u64], conc: f64) -> f64 {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| ln_rising(conc, c)).sum::<f64>()
        - ln_rising(conc * counts.len() as f64, total)
}

struct Instance {
    n_concepts: usize,
    n_features: usize,
    stimuli: Vec<(usize, Vec<usize>)>,
    hyper: Hyperparams,
}

fn oracle_log_joint(inst: &Instance, g: &[usize], k: &[usize]) -> f64 {
    let Hyperparams {
        k: nk,
        g: ng,
        alpha,
        beta,
        gamma,
    } = inst.hyper;
    let v = inst.n_features;
    let mut cat = vec![0u64; nk];
    for &j in k {
        cat[j] += 1;
    }
    let mut cat_ft = vec![vec![0u64; ng]; nk];
    let mut ft_word = vec![vec![0u64; v]; ng];
    for (d, (c, feats)) in inst.stimuli.iter().enumerate() {
        cat_ft[k[*c]][g[d]] += 1;
        for &f in feats {
            ft_word[g[d]][f] += 1;
        }
    }
    dirmult(&cat, alpha)
        + cat_ft.iter().map(|r| dirmult(r, beta)).sum::<f64>()
        + ft_word.iter().map(|r| dirmult(r, gamma)).sum::<f64>()
}

fn normalize(log_w: &[f64]) -> Vec<f64> {
    let m = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Instance, Vec<usize>, Vec<usize>) {
    let d = rng.random_range(1..=6);
    let l = rng.random_range(1..=4);
    let k = rng.random_range(1..=3);
    let g = rng.random_range(1..=3);
    let v = rng.random_range(1..=6);
    let stimuli = (0..d)
        .map(|_| {
            let len = rng.random_range(1..=5);
            (
                rng.random_range(0..l),
                (0..len).map(|_| rng.random_range(0..v)).collect(),
            )
        })
        .collect();
    let mut hyper = Hyperparams::new(k, g);
    hyper.alpha = rng.random_range(0.05..3.0);
    hyper.beta = rng.random_range(0.05..3.0);
    hyper.gamma = rng.random_range(0.05..3.0);
    let g_assign = (0..d).map(|_| rng.random_range(0..g)).collect();
    let k_assign = (0..l).map(|_| rng.random_range(0..k)).collect();
    (
        Instance {
            n_concepts: l,
            n_features: v,
            stimuli,
            hyper,
        },
        g_assign,
        k_assign,
    )
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn conditional_oracle_suite() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_160_601);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    let n_instances = 60;
    for _ in 0..n_instances {
        let (inst, g_assign, k_assign) = random_instance(&mut rng);
        let obs = Observations::new(inst.n_concepts, inst.n_features, &inst.stimuli).unwrap();
        let mut state =
            ModelState::from_assignments(&obs, inst.hyper, g_assign.clone(), k_assign.clone(), 0)
                .unwrap();
        for d in 0..obs.n_stimuli() {
            state.detach_stimulus(&obs, d).unwrap();
            let got = state.conditional_g(&obs, d).unwrap();
            state.attach_stimulus(&obs, d, g_assign[d]).unwrap();
            let expect = normalize(
                &(0..inst.hyper.g)
                    .map(|i| {
                        let mut g = g_assign.clone();
                        g[d] = i;
                        oracle_log_joint(&inst, &g, &k_assign)
                    })
                    .collect::<Vec<_>>(),
            );
            for (a, b) in got.iter().zip(&expect) {
                worst = worst.max(rel_err(*a, *b));
                checked += 1;
            }
        }
        for l in 0..obs.n_concepts() {
            state.detach_concept(&obs, l).unwrap();
            let got = state.conditional_k(&obs, l).unwrap();
            state.attach_concept(&obs, l, k_assign[l]).unwrap();
            let expect = normalize(
                &(0..inst.hyper.k)
                    .map(|j| {
                        let mut k = k_assign.clone();
                        k[l] = j;
                        oracle_log_joint(&inst, &g_assign, &k)
                    })
                    .collect::<Vec<_>>(),
            );
            for (a, b) in got.iter().zip(&expect) {
                worst = worst.max(rel_err(*a, *b));
                checked += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    let pass = worst <= 1e-10 && elapsed < Duration::from_secs(10);
    report(
        "conditional oracle",
        pass,
        &format!("{n_instances} instances, {checked} probabilities, max rel err {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn total_probability() {
    let t0 = Instant::now();
    // K = G = 2, D = 2 stimuli of 3 words each, L = 2, V = 2.
    let hyper = Hyperparams {
        k: 2,
        g: 2,
        alpha: 0.7,
        beta: 0.4,
        gamma: 0.3,
    };
    let concepts = [0usize, 1];
    let len = 3u32;
    let seqs: Vec<Vec<usize>> = (0..(1 << len))
        .map(|bits: u32| (0..len).map(|i| ((bits >> i) & 1) as usize).collect())
        .collect();
    let mut total = 0.0;
    for s0 in &seqs {
        for s1 in &seqs {
            let obs = Observations::new(
                2,
                2,
                &[(concepts[0], s0.clone()), (concepts[1], s1.clone())],
            )
            .unwrap();
            for k in 0..4usize {
                for g in 0..4usize {
                    let state = ModelState::from_assignments(
                        &obs,
                        hyper,
                        vec![g & 1, g >> 1],
                        vec![k & 1, k >> 1],
                        0,
                    )
                    .unwrap();
                    total += state.log_joint().unwrap().exp();
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    let pass = (total - 1.0).abs() < 1e-8 && elapsed < Duration::from_secs(5);
    report(
        "total probability",
        pass,
        &format!("sum = {total:.15} over 1024 configurations, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn count_consistency() {
    let t0 = Instant::now();
    let hyper = Hyperparams::new(5, 8);
    let config = SyntheticConfig {
        n_concepts: 50,
        n_stimuli: 1000,
        stimulus_len: 8,
        n_features: 100,
        seed: 11,
        allow_any_length: false,
    };
    let (set, _) = generate_synthetic(&hyper, &config).unwrap();
    let obs = Observations::from_set(&set);
    let mut state = ModelState::init(&obs, hyper, 5).unwrap();
    for _ in 0..100 {
        state.sweep(&obs).unwrap();
    }
    let recount = CountTables::recount(&obs, &hyper, state.g_assign(), state.k_assign());
    let elapsed = t0.elapsed();
    let pass = recount == *state.counts() && elapsed < Duration::from_secs(10);
    report(
        "count consistency",
        pass,
        &format!(
            "{} stimuli, 100 sweeps, tables equal: {}, {elapsed:.2?}",
            set.len(),
            recount == *state.counts()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// Synthetic recovery and prediction share one trained model.

struct Recovery {
    train: StimulusSet,
    test: StimulusSet,
    truth: SyntheticTruth,
    state: ModelState,
    elapsed: Duration,
}

const SYN_K: usize = 5;
const SYN_G: usize = 8;
const SYN_L: usize = 50;

fn recovery() -> &'static Recovery {
    static CELL: std::sync::OnceLock<Recovery> = std::sync::OnceLock::new();
    CELL.get_or_init(|| {
        let t0 = Instant::now();
        let params = TrueParams::planted_blocks(SYN_K, SYN_G, 100, 10, 2, 0.95).unwrap();
        let config = SyntheticConfig {
            n_concepts: SYN_L,
            n_stimuli: 5300,
            stimulus_len: 8,
            n_features: 100,
            seed: 7,
            allow_any_length: false,
        };
        let (set, truth) = generate_from_params(&params, &config).unwrap();
        let (train, test) = set.split(300, 1).unwrap();
        let obs = Observations::from_set(&train);
        let hyper = Hyperparams::new(SYN_K, SYN_G);
        let chain = ChainConfig {
            sweeps: 500,
            ..ChainConfig::default()
        };
        let run = run_chain(&obs, hyper, 1, &chain).unwrap();
        let state = run.best.to_state(&obs, hyper, 1).unwrap();
        Recovery {
            train,
            test: test.unwrap(),
            truth,
            state,
            elapsed: t0.elapsed(),
        }
    })
}

#[test]
fn synthetic_recovery() {
    let r = recovery();
    let gold = GoldStandard::new(r.truth.gold()).unwrap();
    let vocab = r.train.vocab();
    let learned = Categorization::new(r.state.k_assign().to_vec(), SYN_K).unwrap();
    let s = evaluate(&contingency(&learned.to_named(vocab), &gold).unwrap());
    let random = random_categorize(vocab.n_concepts(), SYN_K, 1).unwrap();
    let sr = evaluate(&contingency(&random.to_named(vocab), &gold).unwrap());
    let pass = s.purity >= 0.9
        && s.collocation >= 0.9
        && s.f1 - sr.f1 >= 0.5
        && r.elapsed < Duration::from_secs(120)
        && r.train.len() == 5000;
    report(
        "synthetic recovery",
        pass,
        &format!(
            "pu {:.3} co {:.3} F1 {:.3} vs random F1 {:.3} (gap {:.3}), D = {}, {:.2?}",
            s.purity,
            s.collocation,
            s.f1,
            sr.f1,
            s.f1 - sr.f1,
            r.train.len(),
            r.elapsed
        ),
    );
    assert!(pass);
}

fn bcf_test_ranks(r: &Recovery) -> Vec<usize> {
    let vocab = r.train.vocab();
    let summary = r.state.posterior_means().unwrap();
    r.test
        .iter_named()
        .map(|st| {
            let c = vocab.concept_id(&st.concept).unwrap();
            let feats: Vec<usize> = st
                .features
                .iter()
                .map(|w| vocab.feature_id(w).unwrap_or(usize::MAX))
                .collect();
            predict_concept_bcf(&summary, r.state.k_assign(), &feats)
                .unwrap()
                .rank_of(c)
                .unwrap()
        })
        .collect()
}

fn precision_at_1_line() -> bool {
    let r = recovery();
    let result = ranking_metrics(bcf_test_ranks(r), SYN_L).unwrap();
    let threshold = 5.0 / SYN_L as f64;
    report(
        "prediction sanity (BCF pr@1 >= 5/L)",
        result.precision_at_1 >= threshold,
        &format!(
            "pr@1 {:.3} vs {threshold:.3} over {} held-out stimuli (pr@10 {:.3}, mean rank {:.2})",
            result.precision_at_1,
            result.ranks.len(),
            result.precision_at_10,
            result.mean_rank
        ),
    )
}

#[test]
#[ignore = "unattainable: concepts sharing a category tie, so pr@1 is capped near K/L = 5/L"]
fn prediction_sanity_precision_at_1() {
    assert!(precision_at_1_line());
}

#[test]
fn prediction_sanity_random_precision_at_10() {
    let r = recovery();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let vocab = r.train.vocab();
    let ranks: Vec<usize> = r
        .test
        .iter_named()
        .map(|st| {
            let c = vocab.concept_id(&st.concept).unwrap();
            random_ranking(&mut rng, SYN_L).rank_of(c).unwrap()
        })
        .collect();
    let n = ranks.len() as f64;
    let result = ranking_metrics(ranks, SYN_L).unwrap();
    let p = 10.0 / SYN_L as f64;
    let sigma = (p * (1.0 - p) / n).sqrt();
    let pass = (result.precision_at_10 - p).abs() <= 3.0 * sigma;
    report(
        "prediction sanity (random pr@10 = 10/L within 3 sigma)",
        pass,
        &format!(
            "pr@10 {:.3} vs {p:.3} +- {:.3}",
            result.precision_at_10,
            3.0 * sigma
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// Metric oracle: metrics counted directly from label pairs.

struct BruteMetrics {
    pu: f64,
    co: f64,
    vh: f64,
    vc: f64,
}

fn brute_metrics(pred: &[usize], gold: &[usize]) -> BruteMetrics {
    let n = pred.len();
    let best_overlap = |a: &[usize], b: &[usize]| -> usize {
        let mut total = 0;
        let mut seen = Vec::new();
        for &x in a {
            if seen.contains(&x) {
                continue;
            }
            seen.push(x);
            let mut per: HashMap<usize, usize> = HashMap::new();
            for i in 0..n {
                if a[i] == x {
                    *per.entry(b[i]).or_default() += 1;
                }
            }
            total += per.values().max().copied().unwrap_or(0);
        }
        total
    };
    let h = |labels: &[usize]| -> f64 {
        let mut c: HashMap<usize, usize> = HashMap::new();
        for &x in labels {
            *c.entry(x).or_default() += 1;
        }
        c.values()
            .map(|&m| {
                let p = m as f64 / n as f64;
                -p * p.ln()
            })
            .sum()
    };
    // H(X|Y) = H(X, Y) - H(Y)
    let joint: Vec<usize> = pred.iter().zip(gold).map(|(p, g)| p * 1000 + g).collect();
    let h_joint = h(&joint);
    let (h_c, h_g) = (h(pred), h(gold));
    let vh = if h_g == 0.0 {
        1.0
    } else {
        1.0 - (h_joint - h_c) / h_g
    };
    let vc = if h_c == 0.0 {
        1.0
    } else {
        1.0 - (h_joint - h_g) / h_c
    };
    BruteMetrics {
        pu: best_overlap(pred, gold) as f64 / n as f64,
        co: best_overlap(gold, pred) as f64 / n as f64,
        vh,
        vc,
    }
}

fn table_of(pred: &[usize], gold: &[usize]) -> ContingencyTable {
    let p: BTreeMap<String, usize> = pred
        .iter()
        .enumerate()
        .map(|(i, &k)| (format!("x{i}"), k))
        .collect();
    let g = GoldStandard::new(
        gold.iter()
            .enumerate()
            .map(|(i, &k)| (format!("x{i}"), format!("g{k}")))
            .collect(),
    )
    .unwrap();
    contingency(&p, &g).unwrap()
}

#[test]
fn metric_oracle_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut exact = true;
    let mut worst_entropy: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=20);
        let kp = rng.random_range(1..=6);
        let kg = rng.random_range(1..=6);
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..kp)).collect();
        let gold: Vec<usize> = (0..n).map(|_| rng.random_range(0..kg)).collect();
        let t = table_of(&pred, &gold);
        let b = brute_metrics(&pred, &gold);
        let beta = rng.random_range(0.1..4.0);
        exact &= purity(&t) == b.pu && collocation(&t) == b.co;
        exact &= f_beta(purity(&t), collocation(&t), beta)
            == (1.0 + beta) * b.pu * b.co / (beta * b.pu + b.co);
        let vm = v_measure(&t, 1.0);
        let vm_oracle = if b.vh + b.vc == 0.0 {
            0.0
        } else {
            2.0 * b.vh * b.vc / (b.vh + b.vc)
        };
        worst_entropy = worst_entropy
            .max((vm.homogeneity - b.vh).abs())
            .max((vm.completeness - b.vc).abs())
            .max((vm.v_measure - vm_oracle).abs());
    }
    let labels: Vec<usize> = (0..20).map(|i| i % 4).collect();
    let relabeled: Vec<usize> = labels.iter().map(|l| 3 - l).collect();
    let perfect = evaluate(&table_of(&relabeled, &labels));
    let all_one = [
        perfect.purity,
        perfect.collocation,
        perfect.f1,
        perfect.homogeneity,
        perfect.completeness,
        perfect.v_measure,
    ]
    .iter()
    .all(|&v| v == 1.0);
    let pass = exact && worst_entropy <= 1e-12 && all_one;
    report(
        "metric oracle",
        pass,
        &format!(
            "1000 tables: pu/co/F exact {exact}, max entropy-metric err {worst_entropy:.1e}, perfect -> 1.0 {all_one}"
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// Arithmetic anchors from published scores.

fn anchor_f1_line() -> bool {
    let f = f_beta(0.552, 0.432, 1.0);
    report(
        "reported-score anchor F1(0.552, 0.432) = 0.484 +- 0.0005",
        (f - 0.484).abs() <= 5e-4,
        &format!("computed {f:.6}, off by {:.6}", (f - 0.484).abs()),
    )
}

fn anchor_vm_line() -> bool {
    let vm = f_beta(0.652, 0.598, 1.0);
    report(
        "reported-score anchor VM(0.652, 0.598) = 0.623 +- 0.0005",
        (vm - 0.623).abs() <= 5e-4,
        &format!("computed {vm:.6}, off by {:.6}", (vm - 0.623).abs()),
    )
}

#[test]
#[ignore = "unattainable: the harmonic mean of the printed, rounded inputs is 0.48468"]
fn reported_f1_anchor() {
    assert!(anchor_f1_line());
}

#[test]
#[ignore = "unattainable: the harmonic mean of the printed, rounded inputs is 0.62383"]
fn reported_vm_anchor() {
    assert!(anchor_vm_line());
}

#[test]
fn known_unattainable_report() {
    // Printed only; the strict assertions live in the ignored tests above.
    anchor_f1_line();
    anchor_vm_line();
    precision_at_1_line();
}

// ---------------------------------------------------------------------------
// Intruder round trip.

fn synthetic_task_sources() -> (Vec<Vec<String>>, Vec<CategoryView>, Vec<Vec<f64>>) {
    let n_types = 60;
    let type_words: Vec<Vec<String>> = (0..n_types)
        .map(|t| (0..20).map(|i| format!("t{t}w{i}")).collect())
        .collect();
    let n_cat = 50;
    let categories = (0..n_cat)
        .map(|k| CategoryView {
            id: k,
            members: (0..4).map(|i| format!("k{k}c{i}")).collect(),
        })
        .collect();
    let relevance = (0..n_cat)
        .map(|k| {
            let mut row = vec![0.0; n_types];
            for (rank, w) in [0.4, 0.25, 0.15, 0.1, 0.1].iter().enumerate() {
                row[(k + rank * 7) % n_types] = *w;
            }
            row
        })
        .collect();
    (type_words, categories, relevance)
}

fn round_trip(dir: &Path, tasks: &[IntruderTask], name: &str) -> Vec<IntruderTask> {
    let (tp, kp) = (
        dir.join(format!("{name}_tasks.csv")),
        dir.join(format!("{name}_key.csv")),
    );
    save_tasks(tasks, &tp).unwrap();
    save_key(tasks, &kp).unwrap();
    load_tasks(&tp, &kp).unwrap()
}

fn annotate(
    dir: &Path,
    tasks: &[IntruderTask],
    name: &str,
    n: usize,
    pick: impl Fn(&IntruderTask) -> usize,
) -> ResponseSet {
    let mut r = ResponseSet::new();
    for t in tasks {
        for a in 0..n {
            r.push(&t.task_id, &format!("a{a:02}"), pick(t));
        }
    }
    let path = dir.join(format!("{name}_responses.csv"));
    save_responses(&r, &path).unwrap();
    load_responses(&path).unwrap()
}

#[test]
fn intruder_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (type_words, categories, relevance) = synthetic_task_sources();
    let coherence: Vec<IntruderTask> = gen_coherence_tasks(&type_words, 5, 21)
        .unwrap()
        .into_iter()
        .take(50)
        .collect();
    let relevance_tasks =
        gen_relevance_tasks(&categories, &relevance, &type_words, 6, 5, 22).unwrap();
    let n_ann = 10;
    let mut lines = Vec::new();
    let mut pass = coherence.len() == 50 && relevance_tasks.len() == 50;
    for (name, generated) in [("coherence", &coherence), ("relevance", &relevance_tasks)] {
        let tasks = round_trip(dir.path(), generated, name);
        pass &= tasks == *generated;
        // Every intruder is foreign to its source.
        for t in &tasks {
            let id: usize = t.task_id.rsplit('-').next().unwrap().parse().unwrap();
            pass &= match t.kind {
                bcf_core::intruder::TaskKind::Coherence => {
                    !type_words[id][..15].iter().any(|w| w == t.intruder())
                }
                bcf_core::intruder::TaskKind::Relevance => (0..type_words.len())
                    .filter(|&g| type_words[g][..5].join(" ") == t.intruder())
                    .all(|g| relevance[id][g] == 0.0),
            };
        }
        let items = tasks[0].n_items();
        let oracle = annotate(dir.path(), &tasks, &format!("{name}_oracle"), n_ann, |t| {
            t.answer_index
        });
        let acc = score_accuracy(&tasks, &oracle).unwrap();
        let kappa = fleiss_kappa(&oracle, items).unwrap();
        pass &= acc == 1.0 && (kappa - 1.0).abs() < 1e-12;

        let rng = std::cell::RefCell::new(ChaCha8Rng::seed_from_u64(if name == "coherence" {
            31
        } else {
            32
        }));
        let random = annotate(dir.path(), &tasks, &format!("{name}_random"), n_ann, |t| {
            rng.borrow_mut().random_range(0..t.n_items())
        });
        let racc = score_accuracy(&tasks, &random).unwrap();
        let rkappa = fleiss_kappa(&random, items).unwrap();
        let p = 1.0 / items as f64;
        let acc_sigma = (p * (1.0 - p) / (tasks.len() * n_ann) as f64).sqrt();
        let kappa_sigma = fleiss_kappa_null_se(tasks.len(), n_ann, &vec![p; items]);
        pass &= (racc - p).abs() <= 3.0 * acc_sigma && rkappa.abs() <= 3.0 * kappa_sigma;
        lines.push(format!(
            "{name}: {} tasks x {items} items, oracle acc {acc:.3} kappa {kappa:.3}; random acc {racc:.3} (1/{items} +- {:.3}) kappa {rkappa:.4} (0 +- {:.4})",
            tasks.len(),
            3.0 * acc_sigma,
            3.0 * kappa_sigma
        ));
    }
    report("intruder round trip", pass, &lines.join("; "));
    assert!(pass);
}

// ---------------------------------------------------------------------------
// Determinism of the full command-line pipeline.

fn bcf(args: &[&str]) {
    let cli = bcf_cli::args::Cli::parse_from(std::iter::once("bcf").chain(args.iter().copied()));
    bcf_cli::run(cli).unwrap();
}

fn pipeline(root: &Path) {
    let p = |s: &str| root.join(s).to_string_lossy().into_owned();
    let (data, model, eval) = (p("data"), p("model"), p("eval"));
    bcf(&[
        "synth",
        "--seed",
        "7",
        "--out-dir",
        &data,
        "--generator",
        "planted",
        "--k",
        "5",
        "--g",
        "8",
        "--concepts",
        "50",
        "--n-stimuli",
        "1300",
        "--stimulus-len",
        "8",
        "--n-features",
        "100",
        "--block",
        "10",
        "--types-per-category",
        "2",
    ]);
    bcf(&[
        "train",
        "--seed",
        "1",
        "--out-dir",
        &model,
        "--stimuli",
        &format!("{data}/stimuli.jsonl"),
        "--k",
        "5",
        "--g",
        "8",
        "--sweeps",
        "40",
        "--chains",
        "2",
        "--test-size",
        "300",
    ]);
    bcf(&[
        "eval",
        "--out-dir",
        &eval,
        "--gold",
        &format!("{data}/gold.tsv"),
        "--pred",
        &format!("bcf={model}"),
    ]);
    bcf(&[
        "predict",
        "--seed",
        "3",
        "--out-dir",
        &eval,
        "--model-dir",
        &model,
    ]);
    bcf(&[
        "tasks",
        "--seed",
        "4",
        "--out-dir",
        &eval,
        "--model-dir",
        &model,
    ]);
}

#[test]
fn determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path());
    pipeline(b.path());
    let reports = [
        "data/stimuli.jsonl",
        "data/gold.tsv",
        "data/truth.json",
        "model/summary.tsv",
        "model/categories.tsv",
        "model/type_words.tsv",
        "model/relevance.tsv",
        "model/model.json",
        "model/chain-0.trace.csv",
        "model/chain-1.ckpt",
        "eval/metrics.tsv",
        "eval/ranking.tsv",
        "eval/ranks.tsv",
        "eval/coherence_tasks.csv",
        "eval/coherence_key.csv",
        "eval/relevance_tasks.csv",
        "eval/relevance_key.csv",
    ];
    let differing: Vec<&str> = reports
        .iter()
        .copied()
        .filter(|r| {
            std::fs::read(a.path().join(r)).unwrap() != std::fs::read(b.path().join(r)).unwrap()
        })
        .collect();
    let pass = differing.is_empty();
    report(
        "determinism",
        pass,
        &format!(
            "{} report files compared, differing: {differing:?}",
            reports.len()
        ),
    );
    assert!(pass);
}
