//! Checkpoints: a JSON header line followed by one line per assignment
//! vector, written as space-separated base-ten integers.
//!
//! ```text
//! {"format":"bcf-checkpoint","version":1,...}
//! g_assign 3 0 1 ...
//! k_assign 2 2 0 ...
//! best_g_assign ...
//! best_k_assign ...
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BestSnapshot, ChainRun, Hyperparams, ModelState, Observations, TracePoint};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::fsutil::{read_to_string, write_atomic};

pub const CHECKPOINT_VERSION: u32 = 1;
const FORMAT: &str = "bcf-checkpoint";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    hyper: Hyperparams,
    seed: u64,
    sweeps: u64,
    /// ChaCha word position, decimal (u128 does not fit a JSON number).
    rng_word_pos: String,
    vocab_digest: String,
    concepts: Vec<String>,
    features: Vec<String>,
    log_joint: f64,
    best_sweep: u64,
    best_log_joint: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    header: Header,
    g_assign: Vec<usize>,
    k_assign: Vec<usize>,
    best_g_assign: Vec<usize>,
    best_k_assign: Vec<usize>,
}

impl Checkpoint {
    pub fn from_run(run: &ChainRun, vocab: &Vocabulary) -> Result<Self> {
        let state = &run.state;
        Ok(Checkpoint {
            header: Header {
                format: FORMAT.into(),
                version: CHECKPOINT_VERSION,
                hyper: *state.hyper(),
                seed: state.seed(),
                sweeps: state.sweeps(),
                rng_word_pos: state.rng_word_pos().to_string(),
                vocab_digest: vocab.digest(),
                concepts: vocab.concept_names().to_vec(),
                features: vocab.feature_names().to_vec(),
                log_joint: state.log_joint()?,
                best_sweep: run.best.sweep,
                best_log_joint: run.best.log_joint,
            },
            g_assign: state.g_assign().to_vec(),
            k_assign: state.k_assign().to_vec(),
            best_g_assign: run.best.g_assign.clone(),
            best_k_assign: run.best.k_assign.clone(),
        })
    }

    pub fn hyper(&self) -> Hyperparams {
        self.header.hyper
    }

    pub fn vocab_digest(&self) -> &str {
        &self.header.vocab_digest
    }

    pub fn sweeps(&self) -> u64 {
        self.header.sweeps
    }

    pub fn vocabulary(&self) -> Result<Vocabulary> {
        Vocabulary::from_names(self.header.concepts.clone(), self.header.features.clone())
    }

    pub fn best(&self) -> BestSnapshot {
        BestSnapshot {
            sweep: self.header.best_sweep,
            log_joint: self.header.best_log_joint,
            g_assign: self.best_g_assign.clone(),
            k_assign: self.best_k_assign.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let header = serde_json::to_string(&self.header).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })?;
        write_atomic(path, |w| {
            writeln!(w, "{header}")?;
            for (name, values) in [
                ("g_assign", &self.g_assign),
                ("k_assign", &self.k_assign),
                ("best_g_assign", &self.best_g_assign),
                ("best_k_assign", &self.best_k_assign),
            ] {
                write!(w, "{name}")?;
                for v in values {
                    write!(w, " {v}")?;
                }
                writeln!(w)?;
            }
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        let mut lines = text.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty checkpoint"))?;
        let probe: serde_json::Value =
            serde_json::from_str(first).map_err(|e| Error::parse(path, 1, e.to_string()))?;
        if probe.get("format").and_then(|f| f.as_str()) != Some(FORMAT) {
            return Err(Error::parse(path, 1, "not a checkpoint file"));
        }
        let found = probe.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if found != CHECKPOINT_VERSION {
            return Err(Error::CheckpointVersion {
                found,
                expected: CHECKPOINT_VERSION,
            });
        }
        let header: Header =
            serde_json::from_value(probe).map_err(|e| Error::parse(path, 1, e.to_string()))?;
        let mut arrays = Vec::new();
        for (i, name) in ["g_assign", "k_assign", "best_g_assign", "best_k_assign"]
            .iter()
            .enumerate()
        {
            let line_no = i + 2;
            let line = lines
                .next()
                .ok_or_else(|| Error::parse(path, line_no, format!("missing {name}")))?;
            let mut parts = line.split_ascii_whitespace();
            if parts.next() != Some(name) {
                return Err(Error::parse(path, line_no, format!("expected {name}")));
            }
            let values = parts
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
            arrays.push(values);
        }
        let mut arrays = arrays.into_iter();
        Ok(Checkpoint {
            header,
            g_assign: arrays.next().unwrap(),
            k_assign: arrays.next().unwrap(),
            best_g_assign: arrays.next().unwrap(),
            best_k_assign: arrays.next().unwrap(),
        })
    }

    /// Rebuilds the chain against its training data. The data's vocabulary
    /// must match the one the checkpoint was written with.
    pub fn restore(&self, obs: &Observations, vocab: &Vocabulary) -> Result<ChainRun> {
        let data = vocab.digest();
        if data != self.header.vocab_digest {
            return Err(Error::VocabularyMismatch {
                model: self.header.vocab_digest.clone(),
                data,
            });
        }
        let word_pos: u128 = self
            .header
            .rng_word_pos
            .parse()
            .map_err(|_| Error::InvalidParameter("bad rng position in checkpoint".into()))?;
        let mut state = ModelState::from_assignments(
            obs,
            self.header.hyper,
            self.g_assign.clone(),
            self.k_assign.clone(),
            self.header.seed,
        )?;
        state.restore_progress(self.header.sweeps, word_pos);
        // Validates the best snapshot against the data as well.
        let best_state = self
            .best()
            .to_state(obs, self.header.hyper, self.header.seed)?;
        let best = BestSnapshot {
            log_joint: best_state.log_joint()?,
            ..self.best()
        };
        ChainRun::resume(state, Some(best))
    }
}

/// `sweep,log_joint` rows, log joint printed with 12 decimals.
pub fn write_trace(path: &Path, trace: &[TracePoint]) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "sweep,log_joint")?;
        for t in trace {
            writeln!(w, "{},{:.12}", t.sweep, t.log_joint)?;
        }
        Ok(())
    })
}

/// Reads a trace written by [`write_trace`].
pub fn read_trace(path: &Path) -> Result<Vec<TracePoint>> {
    let text = crate::fsutil::read_to_string(path)?;
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let parsed = line
                .split_once(',')
                .and_then(|(s, lj)| Some((s.parse().ok()?, lj.parse().ok()?)));
            parsed
                .map(|(sweep, log_joint)| TracePoint { sweep, log_joint })
                .ok_or_else(|| Error::parse(path, i + 1, "expected sweep,log_joint"))
        })
        .collect()
}
