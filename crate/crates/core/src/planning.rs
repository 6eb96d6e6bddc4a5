//! Path costs, turn-level action utilities, the central-control oracle and
//! the soft-max decision rule shared by every model.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, GridSpec, Trial};

/// Shared reward when either agent reaches the target.
pub const REWARD: f64 = 8.0;
/// Shared cost per step.
pub const STEP_COST: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Agent {
    Signaler,
    Receiver,
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agent::Signaler => "signaler",
            Agent::Receiver => "receiver",
        })
    }
}

/// Soft-max inverse temperature, finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Beta(f64);

impl Beta {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta >= 0.0 {
            Ok(Beta(beta))
        } else {
            Err(Error::InvalidParam(format!("beta must be finite and >= 0, got {beta}")))
        }
    }

    pub const fn new_const(beta: f64) -> Option<Self> {
        if beta.is_finite() && beta >= 0.0 {
            Some(Beta(beta))
        } else {
            None
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Beta {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Beta::new(v)
    }
}

impl From<Beta> for f64 {
    fn from(b: Beta) -> f64 {
        b.0
    }
}

/// Shortest 4-connected step counts from one origin. `None` marks cells
/// that cannot be reached (barriers included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCostTable {
    origin: Cell,
    width: u32,
    cost: Vec<Option<u32>>,
}

impl PathCostTable {
    pub fn origin(&self) -> Cell {
        self.origin
    }

    pub fn get(&self, c: Cell) -> Option<u32> {
        if c.col >= self.width {
            return None;
        }
        self.cost.get((c.row * self.width + c.col) as usize).copied().flatten()
    }
}

pub fn path_costs(grid: &GridSpec, origin: Cell) -> Result<PathCostTable> {
    if !grid.is_open(origin) {
        return Err(Error::BadOrigin(origin));
    }
    let mut cost = vec![None; grid.n_cells()];
    cost[grid.index(origin)] = Some(0);
    let mut queue = VecDeque::from([origin]);
    while let Some(c) = queue.pop_front() {
        let d = cost[grid.index(c)].unwrap_or(0);
        for n in grid.neighbors(c) {
            let slot = &mut cost[grid.index(n)];
            if slot.is_none() {
                *slot = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    Ok(PathCostTable {
        origin,
        width: grid.width(),
        cost,
    })
}

/// A trial together with both agents' step counts to every item.
///
/// Every open cell of a valid [`GridSpec`] is reachable from both starts, so
/// construction fails only if that invariant is broken.
#[derive(Debug, Clone)]
pub struct Scene {
    trial: Trial,
    signaler: Vec<u32>,
    receiver: Vec<u32>,
}

impl Scene {
    pub fn new(trial: Trial) -> Result<Self> {
        let grid = trial.grid();
        let from_s = path_costs(grid, grid.signaler_start())?;
        let from_r = path_costs(grid, grid.receiver_start())?;
        let mut signaler = Vec::with_capacity(trial.n_items());
        let mut receiver = Vec::with_capacity(trial.n_items());
        for item in trial.items() {
            match (from_s.get(item.cell()), from_r.get(item.cell())) {
                (Some(s), Some(r)) => {
                    signaler.push(s);
                    receiver.push(r);
                }
                _ => return Err(Error::Unreachable(item.id)),
            }
        }
        Ok(Scene {
            trial,
            signaler,
            receiver,
        })
    }

    pub fn trial(&self) -> &Trial {
        &self.trial
    }

    pub fn n_items(&self) -> usize {
        self.trial.n_items()
    }

    pub fn steps(&self, actor: Agent, item: usize) -> u32 {
        match actor {
            Agent::Signaler => self.signaler[item],
            Agent::Receiver => self.receiver[item],
        }
    }

    /// `8·[item = goal] − steps(actor → item)`.
    pub fn utility(&self, actor: Agent, item: usize, goal: usize) -> f64 {
        let reward = if item == goal { REWARD } else { 0.0 };
        reward - STEP_COST * f64::from(self.steps(actor, item))
    }
}

/// Utility of `actor` walking to `item_id` when the joint goal is `goal_id`.
pub fn action_utility(trial: &Trial, actor: Agent, item_id: usize, goal_id: usize) -> Result<f64> {
    let n = trial.n_items();
    if item_id >= n || goal_id >= n {
        return Err(Error::InvalidParam(format!(
            "item index out of range ({item_id}, {goal_id})"
        )));
    }
    let grid = trial.grid();
    let origin = match actor {
        Agent::Signaler => grid.signaler_start(),
        Agent::Receiver => grid.receiver_start(),
    };
    let steps = path_costs(grid, origin)?
        .get(trial.item(item_id).cell())
        .ok_or(Error::Unreachable(item_id))?;
    let reward = if item_id == goal_id { REWARD } else { 0.0 };
    Ok(reward - STEP_COST * f64::from(steps))
}

/// Central-control plan: who should fetch the target and what it earns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcPlan {
    pub actor: Agent,
    pub item_id: usize,
    pub utility: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct JointOutcome {
    actor: Agent,
    utility: f64,
}

/// Value iteration over the joint state (signaler cell, receiver cell) with
/// the concatenated action set: each step moves exactly one agent. The
/// episode ends with the reward as soon as either agent stands on `target`.
fn joint_value_iteration(grid: &GridSpec, target: Cell) -> Result<JointOutcome> {
    let n = grid.n_cells();
    let open: Vec<bool> = (0..n).map(|i| grid.is_open(grid.cell_at(i))).collect();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            if open[i] {
                grid.neighbors(grid.cell_at(i)).map(|c| grid.index(c)).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let t = grid.index(target);

    let mut value = vec![f64::NEG_INFINITY; n * n];
    for s in 0..n {
        for r in 0..n {
            if open[s] && open[r] && (s == t || r == t) {
                value[s * n + r] = REWARD;
            }
        }
    }

    // Deterministic, undiscounted: converges once values stop moving, which
    // takes at most one sweep per cell.
    let max_sweeps = grid.n_cells() + 1;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut changed = false;
        for s in (0..n).filter(|&s| open[s] && s != t) {
            for r in (0..n).filter(|&r| open[r] && r != t) {
                let best_s = adj[s]
                    .iter()
                    .map(|&s2| value[s2 * n + r])
                    .fold(f64::NEG_INFINITY, f64::max);
                let best_r = adj[r]
                    .iter()
                    .map(|&r2| value[s * n + r2])
                    .fold(f64::NEG_INFINITY, f64::max);
                let v = best_s.max(best_r) - STEP_COST;
                if v > value[s * n + r] {
                    value[s * n + r] = v;
                    changed = true;
                }
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    debug_assert!(converged, "joint value iteration did not converge");

    let s0 = grid.index(grid.signaler_start());
    let r0 = grid.index(grid.receiver_start());
    let q_signaler = adj[s0]
        .iter()
        .map(|&s2| value[s2 * n + r0])
        .fold(f64::NEG_INFINITY, f64::max)
        - STEP_COST;
    let q_receiver = adj[r0]
        .iter()
        .map(|&r2| value[s0 * n + r2])
        .fold(f64::NEG_INFINITY, f64::max)
        - STEP_COST;
    let utility = q_signaler.max(q_receiver);
    if utility == f64::NEG_INFINITY {
        return Err(Error::Unreachable(usize::MAX));
    }
    // Signaler moves first and needs no message, so it takes ties.
    let actor = if q_signaler >= q_receiver {
        Agent::Signaler
    } else {
        Agent::Receiver
    };
    Ok(JointOutcome { actor, utility })
}

/// Central-control optimum via joint value iteration.
pub fn cc_solve(trial: &Trial) -> Result<CcPlan> {
    let target = trial.target();
    let out = joint_value_iteration(trial.grid(), target.cell()).map_err(|_| Error::Unreachable(target.id))?;
    Ok(CcPlan {
        actor: out.actor,
        item_id: target.id,
        utility: out.utility,
    })
}

/// Closed form of the same optimum: the nearer agent walks, ties to the
/// signaler.
pub fn cc_closed_form(scene: &Scene) -> CcPlan {
    let t = scene.trial().target_id();
    let (ds, dr) = (scene.steps(Agent::Signaler, t), scene.steps(Agent::Receiver, t));
    let (actor, d) = if ds <= dr {
        (Agent::Signaler, ds)
    } else {
        (Agent::Receiver, dr)
    };
    CcPlan {
        actor,
        item_id: t,
        utility: REWARD - STEP_COST * f64::from(d),
    }
}

type CacheSlot = Arc<OnceLock<Result<JointOutcome>>>;

/// [`cc_solve`] memoized per (grid, target cell). Each entry is computed
/// exactly once even when many workers ask for it concurrently.
#[derive(Default)]
pub struct CcSolver {
    cache: Mutex<HashMap<(GridSpec, Cell), CacheSlot>>,
}

impl CcSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&self, trial: &Trial) -> Result<CcPlan> {
        let target = trial.target();
        let slot = {
            let mut cache = self.cache.lock().expect("cc cache poisoned");
            cache.entry((trial.grid().clone(), target.cell())).or_default().clone()
        };
        let out = slot
            .get_or_init(|| joint_value_iteration(trial.grid(), target.cell()))
            .clone()
            .map_err(|_| Error::Unreachable(target.id))?;
        Ok(CcPlan {
            actor: out.actor,
            item_id: target.id,
            utility: out.utility,
        })
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.lock().map(|c| c.len()).unwrap_or(0)
    }
}

/// `p_i ∝ exp(β·u_i)`, evaluated with the maximum subtracted.
pub fn softmax(utilities: &[f64], beta: Beta) -> Result<Vec<f64>> {
    let logp = log_softmax(utilities, beta)?;
    Ok(logp.into_iter().map(f64::exp).collect())
}

/// Log-probabilities of [`softmax`]; stays finite where the linear form
/// would underflow.
pub fn log_softmax(utilities: &[f64], beta: Beta) -> Result<Vec<f64>> {
    if utilities.is_empty() {
        return Err(Error::EmptyChoiceSet);
    }
    if let Some(u) = utilities.iter().find(|u| !u.is_finite()) {
        return Err(Error::InvalidParam(format!("non-finite utility {u}")));
    }
    let b = beta.value();
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = utilities.iter().map(|u| (b * (u - max)).exp()).sum();
    let log_z = z.ln();
    Ok(utilities.iter().map(|u| b * (u - max) - log_z).collect())
}

/// Normalizes log-weights into probabilities; all `-inf` is an error.
pub fn normalize_log(logw: &[f64]) -> Option<Vec<f64>> {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    Some(w.into_iter().map(|x| x / z).collect())
}
