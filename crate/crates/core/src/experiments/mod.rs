//! Trial rollouts, communication-optimal filtering, behaviour classes and
//! the two simulation batteries.

pub mod battery;
pub mod records_csv;
pub mod stats;
pub mod summary;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{CommModel, ModelParams, TurnAction};
use crate::error::{Error, Result};
use crate::grid::{BarrierCondition, Feature, Trial};
use crate::planning::{Agent, CcPlan, CcSolver, Scene, REWARD, STEP_COST};

pub use battery::{
    comm_optimal_trials, prepare_trials, run_battery, run_sim1, run_sim2, Arm, CountMode, RunFailure, Sim1Config,
    Sim2Config, SimOutput,
};
pub use summary::{compare_rb_sb, summarize, BarrierComparison, GroupKey, SummaryRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorClass {
    SuccessfulComm,
    UnsuccessfulComm,
    SignalerDoes,
    /// Signaler walked to a non-target item.
    SignalerErrs,
    Quit,
}

impl BehaviorClass {
    pub const ALL: [BehaviorClass; 5] = [
        BehaviorClass::SuccessfulComm,
        BehaviorClass::UnsuccessfulComm,
        BehaviorClass::SignalerDoes,
        BehaviorClass::SignalerErrs,
        BehaviorClass::Quit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BehaviorClass::SuccessfulComm => "successful_comm",
            BehaviorClass::UnsuccessfulComm => "unsuccessful_comm",
            BehaviorClass::SignalerDoes => "signaler_does",
            BehaviorClass::SignalerErrs => "signaler_errs",
            BehaviorClass::Quit => "quit",
        }
    }

    /// Four-way reporting view: wrong walks count as the signaler doing it.
    pub fn reported(self) -> BehaviorClass {
        match self {
            BehaviorClass::SignalerErrs => BehaviorClass::SignalerDoes,
            other => other,
        }
    }

    pub fn is_communication(self) -> bool {
        matches!(self, BehaviorClass::SuccessfulComm | BehaviorClass::UnsuccessfulComm)
    }
}

impl fmt::Display for BehaviorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BehaviorClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BehaviorClass::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown behavior `{s}`")))
    }
}

/// Outcome of one model playing one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub seed: u64,
    pub n_items: usize,
    pub barrier: BarrierCondition,
    pub model: String,
    pub s_level: u8,
    pub r_level: u8,
    pub signaler_action: TurnAction,
    pub receiver_action: Option<TurnAction>,
    pub achieved_utility: f64,
    pub cc_utility: f64,
    /// `achieved / cc`; undefined when the oracle utility is not positive.
    pub pct_optimal: Option<f64>,
    pub behavior: BehaviorClass,
    pub steps_total: u32,
}

impl TrialRecord {
    pub fn signal(&self) -> Option<Feature> {
        match self.signaler_action {
            TurnAction::Send(f) => Some(f),
            _ => None,
        }
    }
}

pub fn classify(signaler: TurnAction, receiver: Option<TurnAction>, target_id: usize) -> BehaviorClass {
    match signaler {
        TurnAction::Send(_) if receiver == Some(TurnAction::GoTo(target_id)) => BehaviorClass::SuccessfulComm,
        TurnAction::Send(_) => BehaviorClass::UnsuccessfulComm,
        TurnAction::GoTo(x) if x == target_id => BehaviorClass::SignalerDoes,
        TurnAction::GoTo(_) => BehaviorClass::SignalerErrs,
        TurnAction::Quit | TurnAction::Pass => BehaviorClass::Quit,
    }
}

/// The receiver should fetch the target and doing so pays.
pub fn is_comm_optimal(plan: &CcPlan) -> bool {
    plan.actor == Agent::Receiver && plan.utility > 0.0
}

/// A trial with its precomputed scene and oracle plan.
#[derive(Debug, Clone)]
pub struct PreparedTrial {
    pub trial_id: u64,
    pub scene: Scene,
    pub cc: CcPlan,
}

impl PreparedTrial {
    pub fn new(trial_id: u64, trial: Trial, solver: &CcSolver) -> Result<Self> {
        let cc = solver.solve(&trial)?;
        Ok(PreparedTrial {
            trial_id,
            scene: Scene::new(trial)?,
            cc,
        })
    }

    pub fn trial(&self) -> &Trial {
        self.scene.trial()
    }
}

/// Plays one trial: the signaler moves first; the receiver moves only if
/// the signaler signalled or walked to a wrong item.
pub fn rollout<R: Rng + ?Sized>(
    prepared: &PreparedTrial,
    model: &dyn CommModel,
    params: &ModelParams,
    rng: &mut R,
) -> Result<TrialRecord> {
    let scene = &prepared.scene;
    let target = scene.trial().target_id();
    let signaler_policy = model.signaler_policy(scene, target, params)?;
    if !signaler_policy.is_legal_for(Agent::Signaler) {
        return Err(Error::InvalidParam(format!(
            "{} signaler policy has illegal support",
            model.name()
        )));
    }
    let first = signaler_policy.sample(rng);

    let mut utility = 0.0;
    let mut steps = 0u32;
    let receiver_policy = match first {
        TurnAction::Quit => None,
        TurnAction::GoTo(x) => {
            let d = scene.steps(Agent::Signaler, x);
            steps += d;
            utility -= STEP_COST * f64::from(d);
            if x == target {
                utility += REWARD;
                None
            } else {
                Some(model.receiver_after_walk(scene, x, params)?)
            }
        }
        TurnAction::Send(f) => Some(model.receiver_policy(scene, f, params)?),
        TurnAction::Pass => unreachable!("legality checked above"),
    };

    let second = match receiver_policy {
        None => None,
        Some(policy) => {
            if !policy.is_legal_for(Agent::Receiver) {
                return Err(Error::InvalidParam(format!(
                    "{} receiver policy has illegal support",
                    model.name()
                )));
            }
            let act = policy.sample(rng);
            if let TurnAction::GoTo(y) = act {
                let d = scene.steps(Agent::Receiver, y);
                steps += d;
                utility -= STEP_COST * f64::from(d);
                if y == target {
                    utility += REWARD;
                }
            }
            Some(act)
        }
    };

    let cc_utility = prepared.cc.utility;
    let trial = scene.trial();
    Ok(TrialRecord {
        trial_id: prepared.trial_id,
        seed: trial.seed(),
        n_items: trial.n_items(),
        barrier: trial.grid().condition(),
        model: model.label().to_string(),
        s_level: params.signaler_level,
        r_level: params.receiver_level,
        signaler_action: first,
        receiver_action: second,
        achieved_utility: utility,
        cc_utility,
        pct_optimal: (cc_utility > 0.0).then(|| utility / cc_utility),
        behavior: classify(first, second, target),
        steps_total: steps,
    })
}
