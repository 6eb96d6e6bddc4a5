//! Joint Utility baseline: no pragmatics. Items are split by who can
//! fetch them more cheaply; signals are truthful but chosen uniformly and
//! read only against the receiver's share of the items.

use crate::error::{Error, Result};
use crate::grid::Feature;
use crate::planning::{log_softmax, Agent, Beta, Scene, REWARD, STEP_COST};
use crate::pragmatics::{consistent, true_features};

use super::{CommModel, ModelParams, Responsibility, TurnAction, TurnPolicy};

/// Receiver takes an item only when strictly closer; ties stay with the
/// signaler, matching the central-control tie rule.
pub fn ju_responsibility(scene: &Scene) -> Responsibility {
    Responsibility::new(
        (0..scene.n_items())
            .map(|x| {
                if scene.steps(Agent::Receiver, x) < scene.steps(Agent::Signaler, x) {
                    Agent::Receiver
                } else {
                    Agent::Signaler
                }
            })
            .collect(),
    )
}

/// Category soft-max over {do, signal, quit}; the signal mass is split
/// evenly over the goal's two true features.
pub fn ju_signaler_policy(scene: &Scene, goal: usize, beta: Beta) -> Result<TurnPolicy> {
    let reach = |who| REWARD - STEP_COST * f64::from(scene.steps(who, goal));
    let logp = log_softmax(&[reach(Agent::Signaler), reach(Agent::Receiver), 0.0], beta)?;
    let [p_do, p_signal, p_quit] = [logp[0].exp(), logp[1].exp(), logp[2].exp()];
    let [f1, f2] = true_features(scene.trial().item(goal));
    Ok(TurnPolicy::from_weights(vec![
        (TurnAction::Send(f1), p_signal / 2.0),
        (TurnAction::Send(f2), p_signal / 2.0),
        (TurnAction::GoTo(goal), p_do),
        (TurnAction::Quit, p_quit),
    ])
    .expect("category soft-max has positive mass"))
}

/// Soft-max over receiver travel utility among `candidates`, preferring
/// those the receiver is responsible for.
fn responsible_softmax(scene: &Scene, candidates: &[usize], beta: Beta) -> Result<TurnPolicy> {
    let duty = ju_responsibility(scene);
    let mine: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|x| duty.of(*x) == Agent::Receiver)
        .collect();
    let pool = if mine.is_empty() { candidates } else { &mine };
    TurnPolicy::softmax(
        pool.iter()
            .map(|x| {
                (
                    TurnAction::GoTo(*x),
                    REWARD - STEP_COST * f64::from(scene.steps(Agent::Receiver, *x)),
                )
            })
            .collect(),
        beta,
    )
}

pub fn ju_receiver_policy(scene: &Scene, signal: Feature, beta: Beta) -> Result<TurnPolicy> {
    let candidates: Vec<usize> = scene
        .trial()
        .items()
        .iter()
        .filter(|it| consistent(signal, it))
        .map(|it| it.id)
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoConsistentReferent(signal));
    }
    responsible_softmax(scene, &candidates, beta)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct JointUtility;

impl CommModel for JointUtility {
    fn name(&self) -> &'static str {
        "ju"
    }

    fn label(&self) -> &'static str {
        "JU"
    }

    fn uses_levels(&self) -> bool {
        false
    }

    fn signaler_policy(&self, scene: &Scene, goal: usize, params: &ModelParams) -> Result<TurnPolicy> {
        ju_signaler_policy(scene, goal, params.beta)
    }

    fn receiver_policy(&self, scene: &Scene, signal: Feature, params: &ModelParams) -> Result<TurnPolicy> {
        ju_receiver_policy(scene, signal, params.beta)
    }

    fn receiver_after_walk(&self, scene: &Scene, walked: usize, params: &ModelParams) -> Result<TurnPolicy> {
        let rest: Vec<usize> = (0..scene.n_items()).filter(|x| *x != walked).collect();
        responsible_softmax(scene, &rest, params.beta)
    }
}
