//! Simulation batteries: filtered trial sets played by several model arms
//! in parallel, with output independent of scheduling.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{CommModel, ModelParams, ModelRegistry};
use crate::error::{Error, Result};
use crate::grid::{default_grid, sample_trial, BarrierCondition, GridSpec, Trial, MAX_ITEMS, MIN_ITEMS};
use crate::planning::{Beta, CcSolver};
use crate::streams::{derive_seed, domain, lane_of, rollout_rng};

use super::{is_comm_optimal, rollout, PreparedTrial, TrialRecord};

/// How the trial count is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Keep the first N trials that pass the communication-optimal filter.
    #[default]
    Filtered,
    /// Generate N trials and keep only those that pass.
    Generated,
}

/// Candidates drawn per requested trial before giving up.
const CANDIDATES_PER_TRIAL: usize = 1000;

/// A policy error on one (trial, arm); the battery carries on without it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub trial_id: u64,
    pub model: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SimOutput {
    pub records: Vec<TrialRecord>,
    pub failures: Vec<RunFailure>,
}

/// One model at one level pair.
#[derive(Clone)]
pub struct Arm {
    pub model: Arc<dyn CommModel>,
    pub params: ModelParams,
}

impl Arm {
    pub fn new(model: Arc<dyn CommModel>, params: ModelParams) -> Self {
        Arm { model, params }
    }

    fn lane(&self) -> u64 {
        lane_of(&format!(
            "{}/{}/{}",
            self.model.label(),
            self.params.signaler_level,
            self.params.receiver_level
        ))
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

/// Plays every arm on every trial. Records come back ordered by trial id,
/// then arm order, whatever the worker count.
pub fn run_battery(trials: &[PreparedTrial], arms: &[Arm], workers: Option<usize>) -> Result<SimOutput> {
    let jobs: Vec<(usize, usize)> = (0..trials.len())
        .flat_map(|t| (0..arms.len()).map(move |a| (t, a)))
        .collect();
    let results: Vec<(u64, usize, std::result::Result<TrialRecord, RunFailure>)> = pool(workers)?.install(|| {
        jobs.par_iter()
            .map(|&(t, a)| {
                let trial = &trials[t];
                let arm = &arms[a];
                let mut rng = rollout_rng(trial.trial().seed(), arm.lane());
                let out = rollout(trial, arm.model.as_ref(), &arm.params, &mut rng).map_err(|e| RunFailure {
                    trial_id: trial.trial_id,
                    model: arm.model.label().to_string(),
                    message: e.to_string(),
                });
                (trial.trial_id, a, out)
            })
            .collect()
    });
    let mut results = results;
    results.sort_by_key(|(id, a, _)| (*id, *a));
    let mut out = SimOutput::default();
    for (_, _, r) in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(f) => out.failures.push(f),
        }
    }
    Ok(out)
}

fn condition_code(c: BarrierCondition) -> u64 {
    match c {
        BarrierCondition::RB => 1,
        BarrierCondition::SB => 2,
        BarrierCondition::Custom => 3,
    }
}

/// Seeded trial set for one (grid, n_items) cell. Candidate `i` is laid out
/// from its own derived seed, so the set does not depend on scan order.
pub fn comm_optimal_trials(
    solver: &CcSolver,
    grid: &GridSpec,
    n_items: usize,
    count: usize,
    master_seed: u64,
    mode: CountMode,
    first_id: u64,
) -> Result<Vec<PreparedTrial>> {
    let stream = domain::TRIALS | (condition_code(grid.condition()) << 8) | n_items as u64;
    let budget = match mode {
        CountMode::Filtered => count.saturating_mul(CANDIDATES_PER_TRIAL).max(CANDIDATES_PER_TRIAL),
        CountMode::Generated => count,
    };
    let mut kept = Vec::with_capacity(count);
    for i in 0..budget {
        if mode == CountMode::Filtered && kept.len() == count {
            break;
        }
        let trial = sample_trial(grid, n_items, derive_seed(master_seed, stream, i as u64))?;
        let prepared = PreparedTrial::new(first_id + kept.len() as u64, trial, solver)?;
        if is_comm_optimal(&prepared.cc) {
            kept.push(prepared);
        }
    }
    if mode == CountMode::Filtered && kept.len() < count {
        return Err(Error::InsufficientData(format!(
            "only {} of {count} communication-optimal {n_items}-item trials in {budget} candidates",
            kept.len()
        )));
    }
    Ok(kept)
}

/// Prepares user-supplied trials, optionally dropping those where
/// communication is not optimal. Ids follow file order.
pub fn prepare_trials(trials: Vec<Trial>, solver: &CcSolver, filter: bool) -> Result<Vec<PreparedTrial>> {
    let mut out = Vec::with_capacity(trials.len());
    for (i, t) in trials.into_iter().enumerate() {
        let p = PreparedTrial::new(i as u64, t, solver)?;
        if !filter || is_comm_optimal(&p.cc) {
            out.push(p);
        }
    }
    Ok(out)
}

fn validate_common(trials: usize, models: &[Arc<dyn CommModel>]) -> Result<()> {
    if trials == 0 {
        return Err(Error::Config("trial count must be at least 1".into()));
    }
    if models.is_empty() {
        return Err(Error::Config("no models selected".into()));
    }
    Ok(())
}

#[derive(Clone)]
pub struct Sim1Config {
    pub trials: usize,
    pub n_items: Vec<usize>,
    pub master_seed: u64,
    pub beta: Beta,
    pub signaler_level: u8,
    pub receiver_level: u8,
    pub models: Vec<Arc<dyn CommModel>>,
    pub grid: GridSpec,
    pub count_mode: CountMode,
    pub workers: Option<usize>,
}

impl Sim1Config {
    /// IW, aRSA, JU and SELF on the receiver-barrier grid, 2 to 9 items.
    pub fn new(trials: usize, master_seed: u64) -> Result<Self> {
        let registry = ModelRegistry::builtin();
        Ok(Sim1Config {
            trials,
            n_items: (MIN_ITEMS..=MAX_ITEMS).collect(),
            master_seed,
            beta: Beta::new(4.0)?,
            signaler_level: 1,
            receiver_level: 1,
            models: registry.select(&["iw", "arsa", "ju", "self"])?,
            grid: default_grid(BarrierCondition::RB)?,
            count_mode: CountMode::Filtered,
            workers: None,
        })
    }
}

pub fn run_sim1(config: &Sim1Config) -> Result<SimOutput> {
    validate_common(config.trials, &config.models)?;
    if config.n_items.is_empty() {
        return Err(Error::Config("no item counts selected".into()));
    }
    let params = ModelParams::from_beta(config.beta, config.signaler_level, config.receiver_level)?;
    let arms: Vec<Arm> = config.models.iter().map(|m| Arm::new(m.clone(), params)).collect();
    let solver = CcSolver::new();
    let mut trials = Vec::new();
    for &n in &config.n_items {
        let first_id = trials.len() as u64;
        trials.extend(comm_optimal_trials(
            &solver,
            &config.grid,
            n,
            config.trials,
            config.master_seed,
            config.count_mode,
            first_id,
        )?);
    }
    run_battery(&trials, &arms, config.workers)
}

#[derive(Clone)]
pub struct Sim2Config {
    pub trials: usize,
    pub n_items: usize,
    pub master_seed: u64,
    pub beta: Beta,
    pub signaler_levels: Vec<u8>,
    pub receiver_levels: Vec<u8>,
    pub models: Vec<Arc<dyn CommModel>>,
    pub grids: Vec<GridSpec>,
    pub count_mode: CountMode,
    pub workers: Option<usize>,
}

impl Sim2Config {
    /// IW and aRSA at 6 items over both barrier conditions and all six
    /// level pairs.
    pub fn new(trials: usize, master_seed: u64) -> Result<Self> {
        let registry = ModelRegistry::builtin();
        Ok(Sim2Config {
            trials,
            n_items: 6,
            master_seed,
            beta: Beta::new(4.0)?,
            signaler_levels: vec![1, 2],
            receiver_levels: vec![0, 1, 2],
            models: registry.select(&["iw", "arsa"])?,
            grids: vec![default_grid(BarrierCondition::RB)?, default_grid(BarrierCondition::SB)?],
            count_mode: CountMode::Filtered,
            workers: None,
        })
    }
}

pub fn run_sim2(config: &Sim2Config) -> Result<SimOutput> {
    validate_common(config.trials, &config.models)?;
    if config.grids.is_empty() || config.signaler_levels.is_empty() || config.receiver_levels.is_empty() {
        return Err(Error::Config("empty condition or level grid".into()));
    }
    let mut arms = Vec::new();
    for m in &config.models {
        for &s in &config.signaler_levels {
            for &r in &config.receiver_levels {
                arms.push(Arm::new(m.clone(), ModelParams::from_beta(config.beta, s, r)?));
            }
        }
    }
    let solver = CcSolver::new();
    let mut trials = Vec::new();
    for grid in &config.grids {
        let first_id = trials.len() as u64;
        trials.extend(comm_optimal_trials(
            &solver,
            grid,
            config.n_items,
            config.trials,
            config.master_seed,
            config.count_mode,
            first_id,
        )?);
    }
    run_battery(&trials, &arms, config.workers)
}
