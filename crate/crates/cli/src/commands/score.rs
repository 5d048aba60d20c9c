use anyhow::Result;
use bcf_core::fsutil::write_atomic;
use bcf_core::intruder::{fleiss_kappa, load_responses, load_tasks, score_accuracy};

use super::{ensure_exists, Global, SCORE_FILE};
use crate::args::ScoreArgs;
use crate::config::require;

pub fn cmd_score(global: &Global, args: &ScoreArgs) -> Result<()> {
    let f = &global.file;
    let tasks_path = require(&args.tasks, &f.tasks, "tasks")?;
    let key_path = require(&args.key, &f.key, "key")?;
    let responses_path = require(&args.responses, &f.responses, "responses")?;
    for (p, what) in [
        (&tasks_path, "task file"),
        (&key_path, "keyfile"),
        (&responses_path, "response file"),
    ] {
        ensure_exists(p, what)?;
    }
    let tasks = load_tasks(&tasks_path, &key_path)?;
    let responses = load_responses(&responses_path)?;
    let accuracy = score_accuracy(&tasks, &responses)?;
    let n_items = tasks.iter().map(|t| t.n_items()).max().unwrap_or(0);
    let kappa = match fleiss_kappa(&responses, n_items) {
        Ok(k) => format!("{k:.3}"),
        Err(e) => {
            log::warn!("no agreement score: {e}");
            "NA".to_owned()
        }
    };
    write_atomic(&global.out(SCORE_FILE), |w| {
        writeln!(w, "metric\tvalue")?;
        writeln!(w, "tasks\t{}", tasks.len())?;
        writeln!(w, "responses\t{}", responses.len())?;
        writeln!(w, "accuracy\t{accuracy:.3}")?;
        writeln!(w, "kappa\t{kappa}")
    })?;
    println!("accuracy {accuracy:.3}\tkappa {kappa}");
    Ok(())
}
