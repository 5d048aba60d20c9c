use anyhow::{bail, Result};
use bcf_core::corpus::save_stimuli;
use bcf_core::fsutil::{write_atomic, write_string_atomic};
use bcf_core::sampler::{
    generate_from_params, generate_synthetic, Hyperparams, SyntheticConfig, TrueParams,
};

use super::{Global, STIMULI_FILE};
use crate::args::SynthArgs;
use crate::config::pick;

pub const TRUTH_FILE: &str = "truth.json";
pub const GOLD_FILE: &str = "gold.tsv";

pub fn cmd_synth(global: &Global, args: &SynthArgs) -> Result<()> {
    let f = &global.file;
    let seed = global.seed()?;
    let k = pick(&args.k, &f.k).unwrap_or(5);
    let g = pick(&args.g, &f.g).unwrap_or(8);
    let mut hyper = Hyperparams::new(k, g);
    hyper.alpha = pick(&args.alpha, &f.alpha).unwrap_or(hyper.alpha);
    hyper.beta = pick(&args.beta, &f.beta).unwrap_or(hyper.beta);
    hyper.gamma = pick(&args.gamma, &f.gamma).unwrap_or(hyper.gamma);
    hyper.validate()?;
    let config = SyntheticConfig {
        n_concepts: pick(&args.concepts, &f.concepts).unwrap_or(50),
        n_stimuli: pick(&args.n_stimuli, &f.n_stimuli).unwrap_or(5000),
        stimulus_len: pick(&args.stimulus_len, &f.stimulus_len).unwrap_or(8),
        n_features: pick(&args.n_features, &f.n_features).unwrap_or(100),
        seed,
        allow_any_length: args.allow_any_length || f.allow_any_length.unwrap_or(false),
    };
    let generator = pick(&args.generator, &f.generator).unwrap_or_else(|| "prior".into());
    let (set, truth) = match generator.as_str() {
        "prior" => generate_synthetic(&hyper, &config)?,
        "planted" => {
            let block = pick(&args.block, &f.block).unwrap_or(config.n_features / g.max(1));
            let params = TrueParams::planted_blocks(
                k,
                g,
                config.n_features,
                block,
                pick(&args.types_per_category, &f.types_per_category).unwrap_or(2.min(g)),
                pick(&args.peak, &f.peak).unwrap_or(0.95),
            )?;
            generate_from_params(&params, &config)?
        }
        other => bail!("unknown generator {other:?} (expected prior or planted)"),
    };
    let truth_json = serde_json::to_string(&truth)? + "\n";
    save_stimuli(&set, &global.out(STIMULI_FILE))?;
    write_string_atomic(&global.out(TRUTH_FILE), &truth_json)?;
    write_atomic(&global.out(GOLD_FILE), |w| {
        writeln!(w, "concept\tcategory")?;
        for (concept, label) in truth.gold() {
            writeln!(w, "{concept}\t{label}")?;
        }
        Ok(())
    })?;
    log::info!(
        "{} synthetic stimuli written to {}",
        set.len(),
        global.out_dir.display()
    );
    Ok(())
}
