use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::ingestion::{extract_events, GameRecord};
use crate::model::{ConstraintSet, Preset, SolverSettings};
use crate::solver::{Posterior, WorldSpace};
use crate::views::{build_view, Viewpoint};

use super::metrics::{map_accuracy, marginal_accuracy};
use super::EvalError;

#[derive(Clone, Debug, PartialEq)]
pub struct RoundMetrics {
    pub round: usize,
    pub marginal_accuracy: f64,
    pub map_accuracy: f64,
    pub entropy_bits: f64,
    pub feasible_count: usize,
    /// Hypotheses that entered the score this round.
    pub active_hypotheses: usize,
}

/// Solves every round of `record` under `preset` from `viewpoint`.
///
/// Hard constraints, assertions and hypotheses accumulate across rounds; the
/// preset decides which soft ones count, so a current-round preset drops
/// earlier hypotheses. View knowledge enters before round 1.
pub fn replay_game(
    record: &GameRecord,
    preset: Preset,
    viewpoint: &Viewpoint,
    settings: &SolverSettings,
) -> Result<Vec<RoundMetrics>, EvalError> {
    let truth = record.require_truth()?;
    let rounds = extract_events(record)?;
    let view = build_view(&record.config, viewpoint, &truth)?;
    let space = WorldSpace::new(record.config.clone())?;
    let settings = SolverSettings { preset, ..settings.clone() };

    let mut acc = ConstraintSet::new();
    acc.extend(view.knowledge().iter().cloned());
    let mut out = Vec::with_capacity(rounds.len());
    for (events, set) in record.rounds.iter().zip(rounds) {
        acc.extend(set.iter().cloned());
        let post: Posterior<f64> = space
            .posterior_at(&acc, &settings, events.index)
            .map_err(|source| EvalError::Solver { round: Some(events.index), source })?;
        out.push(RoundMetrics {
            round: events.index,
            marginal_accuracy: marginal_accuracy(&post.marginals, &truth)?,
            map_accuracy: map_accuracy(post.map_world(), &truth)?,
            entropy_bits: post.entropy_bits,
            feasible_count: post.feasible_count,
            active_hypotheses: post.active_hypotheses(),
        });
    }
    Ok(out)
}

/// One CSV line of replay output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub game_id: String,
    pub round: usize,
    pub preset: String,
    pub view: String,
    pub condition: String,
    pub ma: f64,
    pub map: f64,
    pub entropy_bits: f64,
    pub feasible_count: usize,
}

impl MetricsRow {
    pub fn new(record: &GameRecord, preset: Preset, viewpoint: &Viewpoint, m: &RoundMetrics) -> Self {
        MetricsRow {
            game_id: record.id.clone(),
            round: m.round,
            preset: preset.as_str().to_string(),
            view: viewpoint.to_string(),
            condition: record.condition.map(|c| c.as_str().to_string()).unwrap_or_default(),
            ma: m.marginal_accuracy,
            map: m.map_accuracy,
            entropy_bits: m.entropy_bits,
            feasible_count: m.feasible_count,
        }
    }
}

/// Orders rows by game, round, preset, view.
pub fn sort_rows(rows: &mut [MetricsRow]) {
    rows.sort_by(|a, b| (&a.game_id, a.round, &a.preset, &a.view).cmp(&(&b.game_id, b.round, &b.preset, &b.view)));
}

pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| EvalError::Csv(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record([
            "game_id",
            "round",
            "preset",
            "view",
            "condition",
            "ma",
            "map",
            "entropy_bits",
            "feasible_count",
        ])
        .map_err(|e| EvalError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| EvalError::Csv(e.to_string()))
}

pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<MetricsRow>, EvalError> {
    csv::Reader::from_reader(input).deserialize().collect::<Result<_, _>>().map_err(|e| EvalError::Csv(e.to_string()))
}
