use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::BarrierCondition;
use crate::streams::{derive_seed, domain, lane_of, stats_rng};

use super::stats::{bootstrap_ci, holm, mean, permutation_test};
use super::{BehaviorClass, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    NItems,
    Barrier,
    Model,
    SLevel,
    RLevel,
}

impl GroupKey {
    pub const ALL: [GroupKey; 5] = [
        GroupKey::NItems,
        GroupKey::Barrier,
        GroupKey::Model,
        GroupKey::SLevel,
        GroupKey::RLevel,
    ];

    /// Column name in records and summary files.
    pub fn column(self) -> &'static str {
        match self {
            GroupKey::NItems => "n_items",
            GroupKey::Barrier => "barrier",
            GroupKey::Model => "model",
            GroupKey::SLevel => "s_level",
            GroupKey::RLevel => "r_level",
        }
    }

    /// Sortable value of this key on a record.
    fn value(self, r: &TrialRecord) -> KeyValue {
        match self {
            GroupKey::NItems => KeyValue::Num(r.n_items as u64),
            GroupKey::Barrier => KeyValue::Text(r.barrier.label().to_string()),
            GroupKey::Model => KeyValue::Text(r.model.clone()),
            GroupKey::SLevel => KeyValue::Num(u64::from(r.s_level)),
            GroupKey::RLevel => KeyValue::Num(u64::from(r.r_level)),
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for GroupKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupKey::ALL
            .into_iter()
            .find(|k| k.column() == s.trim())
            .ok_or_else(|| Error::InvalidParam(format!("unknown grouping key `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum KeyValue {
    Num(u64),
    Text(String),
}

impl fmt::Display for KeyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyValue::Num(n) => write!(f, "{n}"),
            KeyValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub keys: Vec<(GroupKey, String)>,
    pub n: usize,
    pub mean_pct: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_success: f64,
    pub p_unsuccess: f64,
    /// Includes wrong-item walks.
    pub p_does: f64,
    pub p_quit: f64,
    /// Raw share of wrong-item walks, already inside `p_does`.
    pub p_errs: f64,
    pub mean_utility: f64,
}

impl SummaryRow {
    pub fn key(&self, k: GroupKey) -> Option<&str> {
        self.keys.iter().find(|(g, _)| *g == k).map(|(_, v)| v.as_str())
    }
}

/// Percent-of-optimal values of records that have one.
fn pcts(records: &[&TrialRecord]) -> Vec<f64> {
    records.iter().filter_map(|r| r.pct_optimal).collect()
}

fn group_by<'a>(records: &'a [TrialRecord], keys: &[GroupKey]) -> BTreeMap<Vec<KeyValue>, Vec<&'a TrialRecord>> {
    let mut groups: BTreeMap<Vec<KeyValue>, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry(keys.iter().map(|k| k.value(r)).collect())
            .or_default()
            .push(r);
    }
    groups
}

/// One row per group, ordered by key values. Bootstrap draws for a group
/// are seeded from `seed` and the group's keys alone.
pub fn summarize(records: &[TrialRecord], keys: &[GroupKey], resamples: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut rows = Vec::new();
    for (values, group) in group_by(records, keys) {
        let xs = pcts(&group);
        if xs.is_empty() {
            return Err(Error::EmptyGroup);
        }
        let label: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        let mut rng = stats_rng(derive_seed(seed, domain::BOOTSTRAP, lane_of(&label.join("/"))));
        let (ci_low, ci_high) = bootstrap_ci(&xs, resamples, 0.95, &mut rng)?;
        let n = group.len();
        let share =
            |class: BehaviorClass| group.iter().filter(|r| r.behavior.reported() == class).count() as f64 / n as f64;
        rows.push(SummaryRow {
            keys: keys.iter().copied().zip(label).collect(),
            n,
            mean_pct: mean(&xs),
            ci_low,
            ci_high,
            p_success: share(BehaviorClass::SuccessfulComm),
            p_unsuccess: share(BehaviorClass::UnsuccessfulComm),
            p_does: share(BehaviorClass::SignalerDoes),
            p_quit: share(BehaviorClass::Quit),
            p_errs: group
                .iter()
                .filter(|r| r.behavior == BehaviorClass::SignalerErrs)
                .count() as f64
                / n as f64,
            mean_utility: group.iter().map(|r| r.achieved_utility).sum::<f64>() / n as f64,
        });
    }
    Ok(rows)
}

/// RB vs SB on one model at one level pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierComparison {
    pub model: String,
    pub s_level: u8,
    pub r_level: u8,
    pub mean_rb: f64,
    pub mean_sb: f64,
    pub p_value: f64,
    /// Holm-adjusted across the level pairs of the same model.
    pub p_adjusted: f64,
}

/// Achieved utilities in RB and SB.
type Samples = (Vec<f64>, Vec<f64>);

/// Permutation test of mean achieved utility, RB against SB, for every
/// (model, level pair), Holm-adjusted within each model.
pub fn compare_rb_sb(records: &[TrialRecord], permutations: usize, seed: u64) -> Result<Vec<BarrierComparison>> {
    let mut cells: BTreeMap<(String, u8, u8), Samples> = BTreeMap::new();
    for r in records {
        let cell = cells.entry((r.model.clone(), r.s_level, r.r_level)).or_default();
        match r.barrier {
            BarrierCondition::RB => cell.0.push(r.achieved_utility),
            BarrierCondition::SB => cell.1.push(r.achieved_utility),
            BarrierCondition::Custom => {}
        }
    }
    if cells.is_empty() {
        return Err(Error::InsufficientData("no records".into()));
    }
    let mut out = Vec::new();
    for ((model, s, r), (rb, sb)) in cells {
        if rb.is_empty() || sb.is_empty() {
            return Err(Error::InsufficientData(format!(
                "{model} ({s},{r}) lacks one barrier condition"
            )));
        }
        let mut rng = stats_rng(derive_seed(
            seed,
            domain::PERMUTATION,
            lane_of(&format!("{model}/{s}/{r}")),
        ));
        out.push(BarrierComparison {
            p_value: permutation_test(&rb, &sb, permutations, &mut rng)?,
            mean_rb: mean(&rb),
            mean_sb: mean(&sb),
            model,
            s_level: s,
            r_level: r,
            p_adjusted: f64::NAN,
        });
    }
    let models: Vec<String> = out.iter().map(|c| c.model.clone()).collect();
    for m in models.iter().collect::<std::collections::BTreeSet<_>>() {
        let idx: Vec<usize> = (0..out.len()).filter(|&i| &out[i].model == m).collect();
        let adj = holm(&idx.iter().map(|&i| out[i].p_value).collect::<Vec<_>>());
        for (i, a) in idx.into_iter().zip(adj) {
            out[i].p_adjusted = a;
        }
    }
    Ok(out)
}
