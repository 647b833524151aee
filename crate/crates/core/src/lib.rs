//! Hidden-role inference as a weighted constraint satisfaction problem.
//!
//! Worlds are complete player-to-role assignments. Hard constraints prune
//! them, soft constraints weight the survivors, and the normalized weights
//! give a posterior with per-player role marginals and a MAP world.

pub mod evaluation;
pub mod grammar;
pub mod ingestion;
pub mod model;
pub mod scalar;
pub mod solver;
pub mod views;

pub use grammar::{parse_constraint_document, serialize_constraint_set, GrammarError};
pub use model::{
    Alignment, Constraint, ConstraintClass, ConstraintKind, ConstraintSet, GameConfig, GameKind, ManualWeights, Preset,
    RoleSpec, SetLabel, SolverSettings, View, ViewKind, World,
};
pub use scalar::Real;
pub use solver::{SolverError, WorldSpace};

pub type Posterior = solver::Posterior<f64>;
pub type WeightedWorld = solver::WeightedWorld<f64>;
pub type IgReport = solver::IgReport<f64>;
pub type GapReport = solver::GapReport<f64>;
