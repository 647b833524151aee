//! Accuracy metrics, round-by-round replay, aggregation and paired tests.

mod aggregate;
mod metrics;
mod replay;
mod stats;
mod synth;

use thiserror::Error;

use crate::ingestion::IngestError;
use crate::model::ViewError;
use crate::solver::SolverError;

pub use aggregate::{
    aggregate, aggregate_group, compare, game_means, AggregateMetrics, GameMeans, GroupKey, Metric, SignificanceReport,
    SignificanceRow, Summary,
};
pub use metrics::{map_accuracy, marginal_accuracy};
pub use replay::{read_metrics_csv, replay_game, sort_rows, write_metrics_csv, MetricsRow, RoundMetrics};
pub use stats::{
    paired_t_test, significant, wilcoxon_signed_rank, StatsError, TTestResult, WilcoxonResult, EXACT_MAX_N,
    SIGNIFICANCE_LEVEL,
};
pub use synth::{synth_games, SynthOptions};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty group: {0}")]
    EmptyGroup(String),
    #[error("key mismatch: {0}")]
    KeyMismatch(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    View(#[from] ViewError),
    #[error("{}{source}", round.map(|r| format!("round {r}: ")).unwrap_or_default())]
    Solver { round: Option<usize>, source: SolverError },
}

impl From<SolverError> for EvalError {
    fn from(source: SolverError) -> Self {
        EvalError::Solver { round: None, source }
    }
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::ShapeMismatch(_) => "SHAPE_MISMATCH",
            EvalError::EmptyGroup(_) => "EMPTY_GROUP",
            EvalError::KeyMismatch(_) => "KEY_MISMATCH",
            EvalError::Csv(_) => "BAD_CSV",
            EvalError::Ingest(e) => e.code(),
            EvalError::View(e) => e.code(),
            EvalError::Solver { source, .. } => source.code(),
        }
    }
}
