use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bcf_core::categorization::load_categorization;
use bcf_core::eval::{contingency, evaluate, write_metrics_report, GoldStandard};

use super::{ensure_exists, Global, CATEGORIES_FILE, METRICS_FILE};
use crate::args::EvalArgs;
use crate::config::require;

/// `NAME=PATH` or `PATH`; a directory stands for its `categories.tsv`.
fn parse_pred(arg: &str) -> (String, PathBuf) {
    let (name, path) = match arg.split_once('=') {
        Some((n, p)) if !n.is_empty() => (Some(n.to_owned()), PathBuf::from(p)),
        _ => (None, PathBuf::from(arg)),
    };
    let (name_source, file) = if path.is_dir() {
        (path.clone(), path.join(CATEGORIES_FILE))
    } else {
        (path.with_extension(""), path)
    };
    let name = name.unwrap_or_else(|| {
        name_source
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| arg.to_owned())
    });
    (name, file)
}

pub fn cmd_eval(global: &Global, args: &EvalArgs) -> Result<()> {
    let gold_path = require(&args.gold, &global.file.gold, "gold")?;
    ensure_exists(&gold_path, "gold standard")?;
    let pred_args = if args.pred.is_empty() {
        global.file.pred.clone().unwrap_or_default()
    } else {
        args.pred.clone()
    };
    if pred_args.is_empty() {
        bail!("missing --pred (or `pred` in the config file)");
    }
    let gold = GoldStandard::load(&gold_path)?;
    let mut rows = Vec::new();
    for arg in &pred_args {
        let (name, path) = parse_pred(arg);
        ensure_exists(&path, "categorization")?;
        let pred = load_categorization(&path)?;
        let table =
            contingency(&pred, &gold).with_context(|| format!("evaluating {}", path.display()))?;
        rows.push((name, evaluate(&table)));
    }
    write_metrics_report(&rows, &global.out(METRICS_FILE))?;
    for (name, s) in &rows {
        println!(
            "{name}\tpu {:.3}\tco {:.3}\tF1 {:.3}\tVM {:.3}",
            s.purity, s.collocation, s.f1, s.v_measure
        );
    }
    Ok(())
}
