//! Records and summary files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::agents::TurnAction;
use crate::error::{Error, Result};
use crate::grid::Feature;

use super::summary::SummaryRow;
use super::TrialRecord;

#[derive(Serialize, Deserialize)]
struct RecordRow {
    trial_id: u64,
    seed: u64,
    n_items: usize,
    barrier: String,
    model: String,
    s_level: u8,
    r_level: u8,
    signaler_action: String,
    signal: String,
    receiver_action: String,
    achieved_utility: f64,
    cc_utility: f64,
    pct_optimal: Option<f64>,
    behavior: String,
    steps_total: u32,
}

/// `goto:3`, `send`, `quit`; the feature goes in its own column.
fn signaler_cell(a: TurnAction) -> String {
    match a {
        TurnAction::Send(_) => "send".into(),
        other => other.to_string(),
    }
}

impl From<&TrialRecord> for RecordRow {
    fn from(r: &TrialRecord) -> Self {
        RecordRow {
            trial_id: r.trial_id,
            seed: r.seed,
            n_items: r.n_items,
            barrier: r.barrier.label().to_string(),
            model: r.model.clone(),
            s_level: r.s_level,
            r_level: r.r_level,
            signaler_action: signaler_cell(r.signaler_action),
            signal: r.signal().map(|f| f.name().to_string()).unwrap_or_default(),
            receiver_action: r.receiver_action.map(|a| a.to_string()).unwrap_or_default(),
            achieved_utility: r.achieved_utility,
            cc_utility: r.cc_utility,
            pct_optimal: r.pct_optimal,
            behavior: r.behavior.name().to_string(),
            steps_total: r.steps_total,
        }
    }
}

impl TryFrom<RecordRow> for TrialRecord {
    type Error = Error;

    fn try_from(row: RecordRow) -> Result<Self> {
        let signaler_action = match row.signaler_action.as_str() {
            "send" => TurnAction::Send(row.signal.parse::<Feature>()?),
            other => other.parse()?,
        };
        let receiver_action = match row.receiver_action.as_str() {
            "" => None,
            s => Some(s.parse()?),
        };
        Ok(TrialRecord {
            trial_id: row.trial_id,
            seed: row.seed,
            n_items: row.n_items,
            barrier: row.barrier.parse()?,
            model: row.model,
            s_level: row.s_level,
            r_level: row.r_level,
            signaler_action,
            receiver_action,
            achieved_utility: row.achieved_utility,
            cc_utility: row.cc_utility,
            pct_optimal: row.pct_optimal,
            behavior: row.behavior.parse()?,
            steps_total: row.steps_total,
        })
    }
}

pub fn write_records<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(RecordRow::from(r))?;
    }
    if records.is_empty() {
        w.write_record([
            "trial_id",
            "seed",
            "n_items",
            "barrier",
            "model",
            "s_level",
            "r_level",
            "signaler_action",
            "signal",
            "receiver_action",
            "achieved_utility",
            "cc_utility",
            "pct_optimal",
            "behavior",
            "steps_total",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize::<RecordRow>()
        .map(|row| TrialRecord::try_from(row?))
        .collect()
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let keys: Vec<&str> = rows
        .first()
        .map(|r| r.keys.iter().map(|(k, _)| k.column()).collect())
        .unwrap_or_default();
    let mut header: Vec<&str> = keys.clone();
    header.extend([
        "n",
        "mean_pct",
        "ci_low",
        "ci_high",
        "p_success",
        "p_unsuccess",
        "p_does",
        "p_quit",
    ]);
    w.write_record(&header)?;
    for r in rows {
        let mut cells: Vec<String> = r.keys.iter().map(|(_, v)| v.clone()).collect();
        cells.push(r.n.to_string());
        for x in [
            r.mean_pct,
            r.ci_low,
            r.ci_high,
            r.p_success,
            r.p_unsuccess,
            r.p_does,
            r.p_quit,
        ] {
            cells.push(format!("{x:.6}"));
        }
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}
