use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Feature;
use crate::planning::Scene;

use super::arsa::ActingRsa;
use super::do_for_self::DoForSelf;
use super::iw::ImaginedWe;
use super::ju::JointUtility;
use super::oracle::CentralControl;
use super::{ModelParams, TurnPolicy};

/// A communication model: how the signaler picks its turn given the goal,
/// and how the receiver answers.
pub trait CommModel: Send + Sync {
    /// Registry key, lower case.
    fn name(&self) -> &'static str;

    /// Label written into records.
    fn label(&self) -> &'static str;

    /// Whether reasoning levels change behaviour.
    fn uses_levels(&self) -> bool {
        true
    }

    fn signaler_policy(&self, scene: &Scene, goal: usize, params: &ModelParams) -> Result<TurnPolicy>;

    fn receiver_policy(&self, scene: &Scene, signal: Feature, params: &ModelParams) -> Result<TurnPolicy>;

    /// Receiver's turn after the signaler walked to the wrong item.
    /// `walked` is no longer a candidate.
    fn receiver_after_walk(&self, scene: &Scene, walked: usize, params: &ModelParams) -> Result<TurnPolicy>;
}

impl fmt::Debug for dyn CommModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CommModel({})", self.name())
    }
}

/// Models by name, in registration order.
#[derive(Clone, Default)]
pub struct ModelRegistry {
    models: Vec<Arc<dyn CommModel>>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// IW, aRSA, JU, Do-For-Self and the central-control oracle.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(ImaginedWe));
        r.register(Arc::new(ActingRsa));
        r.register(Arc::new(JointUtility));
        r.register(Arc::new(DoForSelf));
        r.register(Arc::new(CentralControl));
        r
    }

    /// Adds `model`, replacing any model already registered under its name.
    pub fn register(&mut self, model: Arc<dyn CommModel>) {
        match self.models.iter().position(|m| m.name() == model.name()) {
            Some(i) => self.models[i] = model,
            None => self.models.push(model),
        }
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn CommModel>> {
        let key = name.trim().to_ascii_lowercase();
        self.models
            .iter()
            .find(|m| m.name() == key || m.label().eq_ignore_ascii_case(&key))
            .cloned()
            .ok_or_else(|| Error::UnknownModel(name.to_string()))
    }

    /// Resolves a list of names, keeping their order.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Arc<dyn CommModel>>> {
        names.iter().map(|n| self.get(n.as_ref())).collect()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.models.iter().map(|m| m.name()).collect()
    }
}
