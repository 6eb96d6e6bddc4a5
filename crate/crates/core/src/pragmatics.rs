//! Signal semantics and the recursive speaker/listener ladder.
//!
//! Level 0 is the literal speaker, which names either true feature of its
//! referent with equal probability. A level-k listener inverts the level-k
//! speaker by Bayes under a uniform referent prior. A level-k speaker
//! (k ≥ 1) soft-maximizes the receiver-travel utility it expects from the
//! level-(k−1) listener.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Feature, Item, Trial};
use crate::planning::{log_softmax, normalize_log, Agent, Beta, Scene};

/// Probability of each of the six signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalDistribution {
    prob: [f64; 6],
}

impl SignalDistribution {
    pub fn get(&self, f: Feature) -> f64 {
        self.prob[f.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Feature, f64)> + '_ {
        Feature::ALL.iter().map(|f| (*f, self.prob[f.index()]))
    }

    pub fn support(&self) -> Vec<Feature> {
        self.iter().filter(|(_, p)| *p > 0.0).map(|(f, _)| f).collect()
    }

    pub fn total(&self) -> f64 {
        self.prob.iter().sum()
    }

    /// Highest-probability signal; ties go to the earlier feature.
    pub fn mode(&self) -> Feature {
        let mut best = Feature::ALL[0];
        for f in Feature::ALL {
            if self.get(f) > self.get(best) {
                best = f;
            }
        }
        best
    }
}

/// Probability of each trial item being the referent, indexed by item id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferentDistribution {
    prob: Vec<f64>,
}

impl ReferentDistribution {
    pub fn from_probs(prob: Vec<f64>) -> Self {
        ReferentDistribution { prob }
    }

    pub fn get(&self, item: usize) -> f64 {
        self.prob.get(item).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    pub fn total(&self) -> f64 {
        self.prob.iter().sum()
    }

    /// Item ids carrying the maximal probability.
    pub fn modes(&self, rel_tol: f64) -> Vec<usize> {
        let max = self.prob.iter().copied().fold(0.0, f64::max);
        (0..self.prob.len())
            .filter(|&i| self.prob[i] >= max * (1.0 - rel_tol))
            .collect()
    }
}

pub fn true_features(item: &Item) -> [Feature; 2] {
    item.features()
}

/// Is `signal` a truthful description of `item`?
pub fn consistent(signal: Feature, item: &Item) -> bool {
    item.has(signal)
}

pub fn literal_speaker(trial: &Trial, goal_id: usize) -> SignalDistribution {
    let mut prob = [0.0; 6];
    for f in true_features(trial.item(goal_id)) {
        prob[f.index()] = 0.5;
    }
    SignalDistribution { prob }
}

/// Expected receiver-travel utility of `signal` for `goal` when the
/// receiver goes wherever the level-`listener_level` listener points:
/// `Σ_x L(x | signal) · U_r(x, goal)`.
pub fn listener_expected_utility(
    scene: &Scene,
    listener_level: u8,
    signal: Feature,
    goal: usize,
    beta: Beta,
) -> Result<f64> {
    let listener = rsa_listener(scene, listener_level, signal, beta)?;
    Ok((0..scene.n_items())
        .filter(|&x| listener.get(x) > 0.0)
        .map(|x| listener.get(x) * scene.utility(Agent::Receiver, x, goal))
        .sum())
}

/// Log-probabilities of the level-`level` speaker over the goal's two true
/// features. Signals are free, so only informativeness in utility terms
/// separates them.
fn speaker_log(scene: &Scene, level: u8, goal: usize, beta: Beta) -> Result<[(Feature, f64); 2]> {
    let feats = true_features(scene.trial().item(goal));
    if level == 0 {
        return Ok(feats.map(|f| (f, 0.5f64.ln())));
    }
    let utils = [
        listener_expected_utility(scene, level - 1, feats[0], goal, beta)?,
        listener_expected_utility(scene, level - 1, feats[1], goal, beta)?,
    ];
    let logp = log_softmax(&utils, beta)?;
    Ok([(feats[0], logp[0]), (feats[1], logp[1])])
}

/// Signal-only component of the level-`level` pragmatic speaker. Level 0
/// is the literal speaker.
pub fn rsa_speaker(scene: &Scene, level: u8, goal: usize, beta: Beta) -> Result<SignalDistribution> {
    let mut prob = [0.0; 6];
    for (f, lp) in speaker_log(scene, level, goal, beta)? {
        prob[f.index()] = lp.exp();
    }
    Ok(SignalDistribution { prob })
}

/// Level-`level` listener: posterior over referents given `signal`, under a
/// uniform prior.
pub fn rsa_listener(scene: &Scene, level: u8, signal: Feature, beta: Beta) -> Result<ReferentDistribution> {
    let items = scene.trial().items();
    let mut logw = vec![f64::NEG_INFINITY; items.len()];
    for item in items.iter().filter(|it| consistent(signal, it)) {
        let sp = speaker_log(scene, level, item.id, beta)?;
        logw[item.id] = sp
            .iter()
            .find(|(f, _)| *f == signal)
            .map(|(_, lp)| *lp)
            .unwrap_or(f64::NEG_INFINITY);
    }
    normalize_log(&logw)
        .map(ReferentDistribution::from_probs)
        .ok_or(Error::NoConsistentReferent(signal))
}
