//! Imagined-We communication.
//!
//! Both partners reason about a single joint agent whose goal, once known,
//! fixes what each of them should do. A signal only moves actions by moving
//! the inferred joint goal:
//!
//! * goal posterior: `P(g | f) ∝ L_k(f | g) · P₀(g | a signal was sent)`
//! * action prediction: `P(a | f) = Σ_g P(g | f) · P(a | g)`
//! * signal utility: `E[U(f, g*)] = Σ_a P(a | f) · U(a, g*)`
//!
//! `L_0` is the literal speaker; `L_k` is the level-k Imagined-We signaler
//! restricted to its signals. The cooperative prior `P₀` is the chance that
//! a joint-utility signaler who wants `g` would choose to signal at all
//! rather than walk or quit.

use crate::error::{Error, Result};
use crate::grid::Feature;
use crate::planning::{log_softmax, normalize_log, Agent, Beta, Scene, REWARD, STEP_COST};
use crate::pragmatics::{consistent, true_features};

use super::{CommModel, GoalBelief, ModelParams, TurnAction, TurnPolicy};

/// Receiver plan for a known joint goal: soft-max over walking to any item
/// or passing.
pub fn receiver_goal_policy(scene: &Scene, goal: usize, beta: Beta) -> Result<TurnPolicy> {
    goal_policy_excluding(scene, goal, beta, None)
}

fn goal_policy_excluding(scene: &Scene, goal: usize, beta: Beta, excluded: Option<usize>) -> Result<TurnPolicy> {
    let mut options: Vec<(TurnAction, f64)> = (0..scene.n_items())
        .filter(|x| Some(*x) != excluded)
        .map(|x| (TurnAction::GoTo(x), scene.utility(Agent::Receiver, x, goal)))
        .collect();
    options.push((TurnAction::Pass, 0.0));
    TurnPolicy::softmax(options, beta)
}

/// Log of the cooperative prior weight for `goal`: the signal share of a
/// soft-max over {do it yourself, have the partner do it, quit}.
fn log_signal_share(scene: &Scene, goal: usize, beta: Beta) -> Result<f64> {
    let reach = |who| REWARD - STEP_COST * f64::from(scene.steps(who, goal));
    let logp = log_softmax(&[reach(Agent::Signaler), reach(Agent::Receiver), 0.0], beta)?;
    Ok(logp[1])
}

/// Normalized cooperative prior over goals given that a signal was sent.
pub fn cooperative_prior(scene: &Scene, beta: Beta) -> Result<GoalBelief> {
    let logw = (0..scene.n_items())
        .map(|g| log_signal_share(scene, g, beta))
        .collect::<Result<Vec<_>>>()?;
    normalize_log(&logw)
        .map(GoalBelief::from_probs)
        .ok_or(Error::EmptyChoiceSet)
}

/// `log L_k(signal | goal)`; `-inf` for untruthful signals.
fn log_likelihood(scene: &Scene, signal: Feature, goal: usize, level: u8, beta: Beta) -> Result<f64> {
    let item = scene.trial().item(goal);
    if !consistent(signal, item) {
        return Ok(f64::NEG_INFINITY);
    }
    if level == 0 {
        return Ok(0.5f64.ln());
    }
    // The full signaler policy renormalized over its Send actions is a
    // soft-max over the signal utilities alone.
    let feats = true_features(item);
    let utils = [
        iw_signal_utility(scene, feats[0], goal, level, beta)?,
        iw_signal_utility(scene, feats[1], goal, level, beta)?,
    ];
    let logp = log_softmax(&utils, beta)?;
    Ok(if feats[0] == signal { logp[0] } else { logp[1] })
}

/// Posterior over the joint goal after hearing `signal`, for a receiver
/// reasoning at `receiver_level`.
pub fn iw_goal_posterior(scene: &Scene, signal: Feature, receiver_level: u8, beta: Beta) -> Result<GoalBelief> {
    let mut logw = vec![f64::NEG_INFINITY; scene.n_items()];
    for (g, w) in logw.iter_mut().enumerate() {
        let ll = log_likelihood(scene, signal, g, receiver_level, beta)?;
        if ll > f64::NEG_INFINITY {
            *w = ll + log_signal_share(scene, g, beta)?;
        }
    }
    normalize_log(&logw)
        .map(GoalBelief::from_probs)
        .ok_or(Error::NoConsistentReferent(signal))
}

/// `Σ_g belief(g) · P(a | g)` over the receiver's actions, optionally with
/// one item removed from the action set.
pub fn mix_goal_policies(
    scene: &Scene,
    belief: &GoalBelief,
    beta: Beta,
    excluded: Option<usize>,
) -> Result<TurnPolicy> {
    let mut actions: Vec<TurnAction> = (0..scene.n_items())
        .filter(|x| Some(*x) != excluded)
        .map(TurnAction::GoTo)
        .collect();
    actions.push(TurnAction::Pass);
    let mut mass = vec![0.0; actions.len()];
    for g in 0..scene.n_items() {
        let w = belief.get(g);
        if w == 0.0 {
            continue;
        }
        let plan = goal_policy_excluding(scene, g, beta, excluded)?;
        // same action order as `actions`
        for (m, (_, p)) in mass.iter_mut().zip(plan.entries()) {
            *m += w * p;
        }
    }
    TurnPolicy::from_weights(actions.into_iter().zip(mass).collect())
}

/// Predicted receiver behaviour after `signal`: the goal posterior pushed
/// through per-goal planning.
pub fn iw_receiver_action_dist(scene: &Scene, signal: Feature, receiver_level: u8, beta: Beta) -> Result<TurnPolicy> {
    let belief = iw_goal_posterior(scene, signal, receiver_level, beta)?;
    mix_goal_policies(scene, &belief, beta, None)
}

/// Expected joint utility of sending `signal` when the true goal is `goal`,
/// predicting a receiver one level below the speaker.
pub fn iw_signal_utility(scene: &Scene, signal: Feature, goal: usize, speaker_level: u8, beta: Beta) -> Result<f64> {
    if speaker_level == 0 {
        return Err(Error::InvalidParam("speaker level must be at least 1".into()));
    }
    if !consistent(signal, scene.trial().item(goal)) {
        return Err(Error::InvalidParam(format!(
            "signal {signal} is untruthful for item {goal}"
        )));
    }
    let predicted = iw_receiver_action_dist(scene, signal, speaker_level - 1, beta)?;
    Ok(predicted
        .entries()
        .iter()
        .map(|(a, p)| match a {
            TurnAction::GoTo(x) if *p > 0.0 => p * scene.utility(Agent::Receiver, *x, goal),
            _ => 0.0,
        })
        .sum())
}

/// Signaler's full turn policy: soft-max over truthful signals, walking to
/// any item, and quitting.
pub fn iw_signaler_policy(scene: &Scene, goal: usize, speaker_level: u8, beta: Beta) -> Result<TurnPolicy> {
    let mut options = Vec::with_capacity(scene.n_items() + 3);
    for f in true_features(scene.trial().item(goal)) {
        options.push((
            TurnAction::Send(f),
            iw_signal_utility(scene, f, goal, speaker_level, beta)?,
        ));
    }
    for x in 0..scene.n_items() {
        options.push((TurnAction::GoTo(x), scene.utility(Agent::Signaler, x, goal)));
    }
    options.push((TurnAction::Quit, 0.0));
    TurnPolicy::softmax(options, beta)
}

/// Receiver turn after the signaler walked to `walked` without ending the
/// trial: the cooperative prior with that item ruled out, planned through
/// the same goal mixture.
pub fn iw_receiver_after_walk(scene: &Scene, walked: usize, beta: Beta) -> Result<TurnPolicy> {
    let prior = cooperative_prior(scene, beta)?;
    let mut w: Vec<f64> = prior.probs().to_vec();
    w[walked] = 0.0;
    let z: f64 = w.iter().sum();
    let belief = if z > 0.0 {
        GoalBelief::from_probs(w.into_iter().map(|x| x / z).collect())
    } else {
        let n = scene.n_items() - 1;
        GoalBelief::from_probs(
            (0..scene.n_items())
                .map(|g| if g == walked { 0.0 } else { 1.0 / n as f64 })
                .collect(),
        )
    };
    mix_goal_policies(scene, &belief, beta, Some(walked))
}

/// The Imagined-We model.
#[derive(Debug, Default, Clone, Copy)]
pub struct ImaginedWe;

impl CommModel for ImaginedWe {
    fn name(&self) -> &'static str {
        "iw"
    }

    fn label(&self) -> &'static str {
        "IW"
    }

    fn signaler_policy(&self, scene: &Scene, goal: usize, params: &ModelParams) -> Result<TurnPolicy> {
        iw_signaler_policy(scene, goal, params.signaler_level, params.beta)
    }

    fn receiver_policy(&self, scene: &Scene, signal: Feature, params: &ModelParams) -> Result<TurnPolicy> {
        iw_receiver_action_dist(scene, signal, params.receiver_level, params.beta)
    }

    fn receiver_after_walk(&self, scene: &Scene, walked: usize, params: &ModelParams) -> Result<TurnPolicy> {
        iw_receiver_after_walk(scene, walked, params.beta)
    }
}
