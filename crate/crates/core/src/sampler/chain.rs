use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Hyperparams, ModelState, Observations};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub sweeps: u64,
    /// Stop once the best log joint improves by less than `tolerance`
    /// (relative) over `window` sweeps.
    pub early_stop: bool,
    pub window: u64,
    pub tolerance: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            sweeps: 1000,
            early_stop: false,
            window: 50,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub sweep: u64,
    pub log_joint: f64,
}

/// The highest-scoring assignment seen so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSnapshot {
    pub sweep: u64,
    pub log_joint: f64,
    pub g_assign: Vec<usize>,
    pub k_assign: Vec<usize>,
}

impl BestSnapshot {
    fn of(state: &ModelState, log_joint: f64) -> Self {
        BestSnapshot {
            sweep: state.sweeps(),
            log_joint,
            g_assign: state.g_assign().to_vec(),
            k_assign: state.k_assign().to_vec(),
        }
    }

    /// Rebuilds a sampler state holding this snapshot's assignments.
    pub fn to_state(
        &self,
        obs: &Observations,
        hyper: Hyperparams,
        seed: u64,
    ) -> Result<ModelState> {
        ModelState::from_assignments(
            obs,
            hyper,
            self.g_assign.clone(),
            self.k_assign.clone(),
            seed,
        )
    }
}

#[derive(Debug, Clone)]
pub struct ChainRun {
    pub state: ModelState,
    pub best: BestSnapshot,
    pub trace: Vec<TracePoint>,
    pub stopped_early: bool,
    /// Best log joint after each sweep since the run was started or resumed.
    best_history: Vec<f64>,
}

impl ChainRun {
    pub fn start(obs: &Observations, hyper: Hyperparams, seed: u64) -> Result<Self> {
        let state = ModelState::init(obs, hyper, seed)?;
        Self::resume(state, None)
    }

    /// Continues from an existing state, optionally with a previous best.
    pub fn resume(state: ModelState, best: Option<BestSnapshot>) -> Result<Self> {
        let lj = state.log_joint()?;
        let here = BestSnapshot::of(&state, lj);
        let best = match best {
            Some(b) if b.log_joint >= lj => b,
            _ => here,
        };
        Ok(ChainRun {
            trace: vec![TracePoint {
                sweep: state.sweeps(),
                log_joint: lj,
            }],
            best_history: vec![best.log_joint],
            state,
            best,
            stopped_early: false,
        })
    }

    /// Runs up to `config.sweeps` further sweeps. Splitting a run into
    /// several calls gives the same result as one call.
    pub fn advance(&mut self, obs: &Observations, config: &ChainConfig) -> Result<()> {
        if self.stopped_early {
            return Ok(());
        }
        let best_history = &mut self.best_history;
        for _ in 0..config.sweeps {
            self.state.sweep(obs)?;
            let lj = self.state.log_joint()?;
            self.trace.push(TracePoint {
                sweep: self.state.sweeps(),
                log_joint: lj,
            });
            if lj > self.best.log_joint {
                self.best = BestSnapshot::of(&self.state, lj);
            }
            best_history.push(self.best.log_joint);
            let t = best_history.len() - 1;
            if config.early_stop && t as u64 >= config.window {
                let then = best_history[t - config.window as usize];
                if self.best.log_joint - then < config.tolerance * then.abs() {
                    self.stopped_early = true;
                    log::info!("early stop after {} sweeps", self.state.sweeps());
                    break;
                }
            }
        }
        Ok(())
    }
}

pub fn run_chain(
    obs: &Observations,
    hyper: Hyperparams,
    seed: u64,
    config: &ChainConfig,
) -> Result<ChainRun> {
    let mut run = ChainRun::start(obs, hyper, seed)?;
    run.advance(obs, config)?;
    Ok(run)
}

/// Independent chains, one per seed, run in parallel.
pub fn run_chains(
    obs: &Observations,
    hyper: Hyperparams,
    seeds: &[u64],
    config: &ChainConfig,
) -> Result<Vec<ChainRun>> {
    seeds
        .par_iter()
        .map(|&seed| run_chain(obs, hyper, seed, config))
        .collect()
}

/// Well-spread per-chain seeds derived from one base seed (splitmix64).
pub fn chain_seeds(base: u64, n: usize) -> Vec<u64> {
    let mut x = base;
    (0..n)
        .map(|_| {
            x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = x;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        })
        .collect()
}
