//! Do-For-Self baseline: the signaler always walks to the target itself.

use crate::error::Result;
use crate::grid::Feature;
use crate::planning::Scene;

use super::{CommModel, ModelParams, TurnAction, TurnPolicy};

pub fn self_policy(scene: &Scene, goal: usize) -> TurnPolicy {
    debug_assert!(goal < scene.n_items());
    TurnPolicy::point(TurnAction::GoTo(goal))
}

#[derive(Debug, Default, Clone, Copy)]
pub struct DoForSelf;

impl CommModel for DoForSelf {
    fn name(&self) -> &'static str {
        "self"
    }

    fn label(&self) -> &'static str {
        "SELF"
    }

    fn uses_levels(&self) -> bool {
        false
    }

    fn signaler_policy(&self, scene: &Scene, goal: usize, _params: &ModelParams) -> Result<TurnPolicy> {
        Ok(self_policy(scene, goal))
    }

    // Never reached in a rollout; a literal reading keeps the trait total.
    fn receiver_policy(&self, scene: &Scene, signal: Feature, _params: &ModelParams) -> Result<TurnPolicy> {
        TurnPolicy::from_weights(
            scene
                .trial()
                .items()
                .iter()
                .map(|it| (TurnAction::GoTo(it.id), if it.has(signal) { 1.0 } else { 0.0 }))
                .collect(),
        )
    }

    fn receiver_after_walk(&self, _scene: &Scene, _walked: usize, _params: &ModelParams) -> Result<TurnPolicy> {
        Ok(TurnPolicy::point(TurnAction::Pass))
    }
}
