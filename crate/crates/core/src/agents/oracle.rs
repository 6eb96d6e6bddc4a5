//! Central control as a playable strategy: both agents share the target,
//! so the nearer one walks and a signal is only a formality. Reproduces the
//! oracle utility exactly and serves as a harness sanity check.

use crate::error::Result;
use crate::grid::Feature;
use crate::planning::{cc_closed_form, Agent, Scene};
use crate::pragmatics::true_features;

use super::{CommModel, ModelParams, TurnAction, TurnPolicy};

#[derive(Debug, Default, Clone, Copy)]
pub struct CentralControl;

impl CommModel for CentralControl {
    fn name(&self) -> &'static str {
        "cc"
    }

    fn label(&self) -> &'static str {
        "CC"
    }

    fn uses_levels(&self) -> bool {
        false
    }

    fn signaler_policy(&self, scene: &Scene, goal: usize, _params: &ModelParams) -> Result<TurnPolicy> {
        let plan = cc_closed_form(scene);
        Ok(match plan.actor {
            Agent::Signaler => TurnPolicy::point(TurnAction::GoTo(goal)),
            Agent::Receiver => TurnPolicy::point(TurnAction::Send(true_features(scene.trial().item(goal))[0])),
        })
    }

    /// Reads the hidden target from the trial.
    fn receiver_policy(&self, scene: &Scene, _signal: Feature, _params: &ModelParams) -> Result<TurnPolicy> {
        Ok(TurnPolicy::point(TurnAction::GoTo(scene.trial().target_id())))
    }

    fn receiver_after_walk(&self, scene: &Scene, _walked: usize, _params: &ModelParams) -> Result<TurnPolicy> {
        Ok(TurnPolicy::point(TurnAction::GoTo(scene.trial().target_id())))
    }
}
