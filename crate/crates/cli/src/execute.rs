//! Runs a resolved configuration and emits its files.

use std::fmt::Write as _;
use std::fs;
use std::sync::Arc;

use coopsig::agents::{CommModel, ModelParams, ModelRegistry};
use coopsig::experiments::records_csv::{read_records, write_records, write_summary};
use coopsig::experiments::{
    comm_optimal_trials, compare_rb_sb, prepare_trials, run_battery, run_sim1, run_sim2, summarize, Arm,
    BarrierComparison, Sim1Config, Sim2Config, SimOutput, TrialRecord,
};
use coopsig::grid::{default_grid, load_trials, save_trials};
use coopsig::planning::{Beta, CcSolver};
use coopsig::Error;

use crate::config::{Command, RunConfig};
use crate::output::Emitter;

/// A runtime failure; reported with exit status 1.
#[derive(Debug)]
pub struct RuntimeError(pub String);

impl From<Error> for RuntimeError {
    fn from(e: Error) -> Self {
        RuntimeError(e.to_string())
    }
}

impl From<std::io::Error> for RuntimeError {
    fn from(e: std::io::Error) -> Self {
        RuntimeError(format!("io: {e}"))
    }
}

type Result<T> = std::result::Result<T, RuntimeError>;

pub fn execute(cfg: &RunConfig) -> Result<()> {
    let mut emit = Emitter::new(&cfg.out);
    let failures = match cfg.command {
        Command::GenTrials => {
            gen_trials(cfg, &mut emit)?;
            0
        }
        Command::Run => {
            let out = run(cfg)?;
            emit_records(cfg, &out, &mut emit)?
        }
        Command::Sim1 => {
            let out = run_sim1(&sim1_config(cfg)?)?;
            emit_records(cfg, &out, &mut emit)?
        }
        Command::Sim2 => {
            let out = run_sim2(&sim2_config(cfg)?)?;
            let failures = emit_records(cfg, &out, &mut emit)?;
            let cmp = compare_rb_sb(&out.records, cfg.permutations, cfg.seed)?;
            emit.emit("rb_vs_sb.csv", comparison_csv(&cmp).as_bytes())?;
            failures
        }
        Command::Report => {
            let path = cfg.records.as_ref().expect("report config carries a records path");
            let records = read_records(fs::File::open(path)?)?;
            emit_summary(cfg, &records, &mut emit)?;
            0
        }
    };
    emit.finish(cfg, failures)?;
    Ok(())
}

fn beta(cfg: &RunConfig) -> Result<Beta> {
    Ok(Beta::new(cfg.beta)?)
}

fn models(cfg: &RunConfig) -> Result<Vec<Arc<dyn CommModel>>> {
    Ok(ModelRegistry::builtin().select(&cfg.models)?)
}

fn sim1_config(cfg: &RunConfig) -> Result<Sim1Config> {
    let mut s = Sim1Config::new(cfg.n, cfg.seed)?;
    s.n_items = cfg.n_items.clone();
    s.beta = beta(cfg)?;
    s.signaler_level = cfg.s_levels[0];
    s.receiver_level = cfg.r_levels[0];
    s.models = models(cfg)?;
    s.grid = default_grid(cfg.barriers[0])?;
    s.count_mode = cfg.count_mode;
    s.workers = Some(cfg.workers);
    Ok(s)
}

fn sim2_config(cfg: &RunConfig) -> Result<Sim2Config> {
    let mut s = Sim2Config::new(cfg.n, cfg.seed)?;
    s.n_items = cfg.n_items[0];
    s.beta = beta(cfg)?;
    s.signaler_levels = cfg.s_levels.clone();
    s.receiver_levels = cfg.r_levels.clone();
    s.models = models(cfg)?;
    s.grids = cfg
        .barriers
        .iter()
        .map(|&b| default_grid(b))
        .collect::<coopsig::Result<_>>()?;
    s.count_mode = cfg.count_mode;
    s.workers = Some(cfg.workers);
    Ok(s)
}

fn gen_trials(cfg: &RunConfig, emit: &mut Emitter) -> Result<()> {
    let solver = CcSolver::new();
    let mut trials = Vec::new();
    for &b in &cfg.barriers {
        let grid = default_grid(b)?;
        for &n in &cfg.n_items {
            let first = trials.len() as u64;
            let kept = comm_optimal_trials(&solver, &grid, n, cfg.n, cfg.seed, cfg.count_mode, first)?;
            trials.extend(kept.into_iter().map(|p| p.trial().clone()));
        }
    }
    let mut json = save_trials(&trials)?;
    json.push('\n');
    emit.emit("trials.json", json.as_bytes())?;
    Ok(())
}

fn run(cfg: &RunConfig) -> Result<SimOutput> {
    let Some(path) = &cfg.trials else {
        return Ok(run_sim1(&sim1_config(cfg)?)?);
    };
    let text = fs::read_to_string(path)?;
    let trials = load_trials(&text)?;
    let total = trials.len();
    let prepared = prepare_trials(trials, &CcSolver::new(), true)?;
    if prepared.len() < total {
        eprintln!(
            "note: {} of {total} trials are not communication-optimal and were skipped",
            total - prepared.len()
        );
    }
    if prepared.is_empty() {
        return Err(RuntimeError(format!(
            "{}: no communication-optimal trials",
            path.display()
        )));
    }
    let params = ModelParams::from_beta(beta(cfg)?, cfg.s_levels[0], cfg.r_levels[0])?;
    let arms: Vec<Arm> = models(cfg)?.into_iter().map(|m| Arm::new(m, params)).collect();
    Ok(run_battery(&prepared, &arms, Some(cfg.workers))?)
}

fn emit_records(cfg: &RunConfig, out: &SimOutput, emit: &mut Emitter) -> Result<usize> {
    for f in &out.failures {
        eprintln!("warning: trial {} model {}: {}", f.trial_id, f.model, f.message);
    }
    if out.records.is_empty() {
        return Err(RuntimeError("no records were produced".into()));
    }
    let mut buf = Vec::new();
    write_records(&mut buf, &out.records)?;
    emit.emit("records.csv", &buf)?;
    emit_summary(cfg, &out.records, emit)?;
    Ok(out.failures.len())
}

fn emit_summary(cfg: &RunConfig, records: &[TrialRecord], emit: &mut Emitter) -> Result<()> {
    let rows = summarize(records, &cfg.group_by, cfg.resamples, cfg.seed)?;
    let mut buf = Vec::new();
    write_summary(&mut buf, &rows)?;
    emit.emit("summary.csv", &buf)?;
    Ok(())
}

fn comparison_csv(rows: &[BarrierComparison]) -> String {
    let mut s = String::from("model,s_level,r_level,mean_rb,mean_sb,p_value,p_adjusted\n");
    for c in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            c.model, c.s_level, c.r_level, c.mean_rb, c.mean_sb, c.p_value, c.p_adjusted
        );
    }
    s
}
