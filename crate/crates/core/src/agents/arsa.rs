//! Acting RSA: the pragmatic speaker gains walk and quit options, and its
//! signal utilities become expected receiver-travel utilities under the
//! pragmatic listener. The receiver stays a pure pragmatic listener.

use crate::error::{Error, Result};
use crate::grid::Feature;
use crate::planning::{Agent, Beta, Scene};
use crate::pragmatics::{consistent, listener_expected_utility, rsa_listener, true_features};

use super::{CommModel, ModelParams, TurnAction, TurnPolicy};

/// `Σ_x L_{k−1}(x | signal) · U(receiver walks to x, goal)`.
pub fn arsa_signal_utility(scene: &Scene, signal: Feature, goal: usize, speaker_level: u8, beta: Beta) -> Result<f64> {
    if speaker_level == 0 {
        return Err(Error::InvalidParam("speaker level must be at least 1".into()));
    }
    if !consistent(signal, scene.trial().item(goal)) {
        return Err(Error::InvalidParam(format!(
            "signal {signal} is untruthful for item {goal}"
        )));
    }
    listener_expected_utility(scene, speaker_level - 1, signal, goal, beta)
}

pub fn arsa_signaler_policy(scene: &Scene, goal: usize, speaker_level: u8, beta: Beta) -> Result<TurnPolicy> {
    let mut options = Vec::with_capacity(scene.n_items() + 3);
    for f in true_features(scene.trial().item(goal)) {
        options.push((
            TurnAction::Send(f),
            arsa_signal_utility(scene, f, goal, speaker_level, beta)?,
        ));
    }
    for x in 0..scene.n_items() {
        options.push((TurnAction::GoTo(x), scene.utility(Agent::Signaler, x, goal)));
    }
    options.push((TurnAction::Quit, 0.0));
    TurnPolicy::softmax(options, beta)
}

/// The listener's referent distribution, read directly as where to walk.
pub fn arsa_receiver_policy(scene: &Scene, signal: Feature, receiver_level: u8, beta: Beta) -> Result<TurnPolicy> {
    let listener = rsa_listener(scene, receiver_level, signal, beta)?;
    TurnPolicy::from_weights(
        (0..scene.n_items())
            .map(|x| (TurnAction::GoTo(x), listener.get(x)))
            .collect(),
    )
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ActingRsa;

impl CommModel for ActingRsa {
    fn name(&self) -> &'static str {
        "arsa"
    }

    fn label(&self) -> &'static str {
        "ARSA"
    }

    fn signaler_policy(&self, scene: &Scene, goal: usize, params: &ModelParams) -> Result<TurnPolicy> {
        arsa_signaler_policy(scene, goal, params.signaler_level, params.beta)
    }

    fn receiver_policy(&self, scene: &Scene, signal: Feature, params: &ModelParams) -> Result<TurnPolicy> {
        arsa_receiver_policy(scene, signal, params.receiver_level, params.beta)
    }

    /// No signal to interpret: uniform over the remaining items.
    fn receiver_after_walk(&self, scene: &Scene, walked: usize, _params: &ModelParams) -> Result<TurnPolicy> {
        TurnPolicy::from_weights(
            (0..scene.n_items())
                .filter(|x| *x != walked)
                .map(|x| (TurnAction::GoTo(x), 1.0))
                .collect(),
        )
    }
}
