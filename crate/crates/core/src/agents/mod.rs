//! Turn-level decision policies for every communication model.
//!
//! Each model is a [`CommModel`] strategy, registered by name in a
//! [`ModelRegistry`] and selected at run time.

pub mod arsa;
pub mod do_for_self;
pub mod iw;
pub mod ju;
pub mod oracle;
pub mod registry;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Feature;
use crate::planning::{log_softmax, Agent, Beta};

pub use registry::{CommModel, ModelRegistry};

pub const MAX_SIGNALER_LEVEL: u8 = 2;
pub const MAX_RECEIVER_LEVEL: u8 = 2;

/// One agent's move for its turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TurnAction {
    GoTo(usize),
    Send(Feature),
    /// Signaler only; ends the trial at zero utility.
    Quit,
    /// Receiver only; do nothing.
    Pass,
}

impl TurnAction {
    pub fn legal_for(self, agent: Agent) -> bool {
        match self {
            TurnAction::GoTo(_) => true,
            TurnAction::Send(_) | TurnAction::Quit => agent == Agent::Signaler,
            TurnAction::Pass => agent == Agent::Receiver,
        }
    }

    /// Rank used to break exact probability ties in [`TurnPolicy::mode`].
    fn tie_rank(self) -> u8 {
        match self {
            TurnAction::Send(_) => 0,
            TurnAction::GoTo(_) => 1,
            TurnAction::Quit => 2,
            TurnAction::Pass => 3,
        }
    }
}

impl fmt::Display for TurnAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TurnAction::GoTo(i) => write!(f, "goto:{i}"),
            TurnAction::Send(s) => write!(f, "send:{s}"),
            TurnAction::Quit => f.write_str("quit"),
            TurnAction::Pass => f.write_str("pass"),
        }
    }
}

impl FromStr for TurnAction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quit" => Ok(TurnAction::Quit),
            "pass" => Ok(TurnAction::Pass),
            _ => {
                let bad = || Error::InvalidParam(format!("bad action `{s}`"));
                let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
                match kind {
                    "goto" => arg.parse().map(TurnAction::GoTo).map_err(|_| bad()),
                    "send" => arg.parse().map(TurnAction::Send),
                    _ => Err(bad()),
                }
            }
        }
    }
}

/// Probability distribution over one agent's turn actions. Entries keep
/// their construction order, which makes sampling reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnPolicy {
    entries: Vec<(TurnAction, f64)>,
}

impl TurnPolicy {
    /// Soft-max over `(action, utility)` options.
    pub fn softmax(options: Vec<(TurnAction, f64)>, beta: Beta) -> Result<Self> {
        let utils: Vec<f64> = options.iter().map(|(_, u)| *u).collect();
        let logp = log_softmax(&utils, beta)?;
        Ok(TurnPolicy {
            entries: options
                .into_iter()
                .zip(logp)
                .map(|((a, _), lp)| (a, lp.exp()))
                .collect(),
        })
    }

    pub fn point(action: TurnAction) -> Self {
        TurnPolicy {
            entries: vec![(action, 1.0)],
        }
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(entries: Vec<(TurnAction, f64)>) -> Result<Self> {
        let z: f64 = entries.iter().map(|(_, w)| *w).sum();
        if entries.is_empty() || !z.is_finite() || z <= 0.0 {
            return Err(Error::EmptyChoiceSet);
        }
        Ok(TurnPolicy {
            entries: entries.into_iter().map(|(a, w)| (a, w / z)).collect(),
        })
    }

    pub fn entries(&self) -> &[(TurnAction, f64)] {
        &self.entries
    }

    pub fn prob(&self, action: TurnAction) -> f64 {
        self.entries.iter().filter(|(a, _)| *a == action).map(|(_, p)| *p).sum()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Total mass on `Send` actions.
    pub fn send_mass(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(a, _)| matches!(a, TurnAction::Send(_)))
            .map(|(_, p)| *p)
            .sum()
    }

    pub fn is_legal_for(&self, agent: Agent) -> bool {
        self.entries.iter().all(|(a, p)| *p == 0.0 || a.legal_for(agent))
    }

    /// Most probable action. Exact ties prefer Send, then GoTo, then Quit,
    /// then Pass, then construction order.
    pub fn mode(&self) -> TurnAction {
        let max = self.entries.iter().map(|(_, p)| *p).fold(0.0, f64::max);
        self.entries
            .iter()
            .filter(|(_, p)| *p >= max * (1.0 - 1e-9))
            .min_by_key(|(a, _)| a.tie_rank())
            .map(|(a, _)| *a)
            .expect("policy has at least one entry")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TurnAction {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = None;
        for (a, p) in &self.entries {
            if *p <= 0.0 {
                continue;
            }
            acc += p;
            last = Some(*a);
            if u < acc {
                return *a;
            }
        }
        last.expect("policy has positive mass")
    }
}

/// Posterior over which item is the joint goal, indexed by item id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalBelief {
    prob: Vec<f64>,
}

impl GoalBelief {
    pub fn from_probs(prob: Vec<f64>) -> Self {
        GoalBelief { prob }
    }

    pub fn get(&self, goal: usize) -> f64 {
        self.prob.get(goal).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    pub fn total(&self) -> f64 {
        self.prob.iter().sum()
    }

    pub fn modes(&self, rel_tol: f64) -> Vec<usize> {
        let max = self.prob.iter().copied().fold(0.0, f64::max);
        (0..self.prob.len())
            .filter(|&i| self.prob[i] >= max * (1.0 - rel_tol))
            .collect()
    }
}

/// Rationality and reasoning depth for one signaler/receiver pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: Beta,
    pub signaler_level: u8,
    pub receiver_level: u8,
}

impl ModelParams {
    pub fn new(beta: f64, signaler_level: u8, receiver_level: u8) -> Result<Self> {
        Self::from_beta(Beta::new(beta)?, signaler_level, receiver_level)
    }

    pub fn from_beta(beta: Beta, signaler_level: u8, receiver_level: u8) -> Result<Self> {
        if !(1..=MAX_SIGNALER_LEVEL).contains(&signaler_level) {
            return Err(Error::InvalidParam(format!(
                "signaler level {signaler_level} outside [1, 2]"
            )));
        }
        if receiver_level > MAX_RECEIVER_LEVEL {
            return Err(Error::InvalidParam(format!(
                "receiver level {receiver_level} outside [0, 2]"
            )));
        }
        Ok(ModelParams {
            beta,
            signaler_level,
            receiver_level,
        })
    }
}

/// Which agent is responsible for fetching each item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Responsibility {
    assignment: Vec<Agent>,
}

impl Responsibility {
    pub fn new(assignment: Vec<Agent>) -> Self {
        Responsibility { assignment }
    }

    pub fn of(&self, item: usize) -> Agent {
        self.assignment[item]
    }

    pub fn assignment(&self) -> &[Agent] {
        &self.assignment
    }
}
