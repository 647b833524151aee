//! Exact enumeration engine.
//!
//! Inference runs in three steps: prune the world space with the hard
//! constraints, score the survivors with the soft ones and normalize, then
//! read off marginals, the MAP world and the entropy. Hypothesis weights are
//! resolved per preset, either manually or by information gain.

mod entropy;
mod enumerate;
mod gap;
mod ig;
#[cfg(feature = "mcmc")]
mod mcmc;
mod posterior;
mod predicate;
mod score;

use thiserror::Error;

use crate::model::{Constraint, ConstraintClass, ConstraintError, SettingsError};

pub use entropy::entropy_bits;
pub use enumerate::{enumerate_worlds, world_count};
pub use gap::{soft_hard_gap, GapReport};
pub use ig::{info_gain, IgReport};
#[cfg(feature = "mcmc")]
pub use mcmc::{mcmc_posterior, McmcOptions};
pub use posterior::{posterior, HypothesisWeight, Posterior, WeightedWorld, WorldSpace};
pub use predicate::{apply_hard, satisfies};
pub use score::score_world;

/// The hard constraint whose addition emptied the feasible set.
#[derive(Clone, Debug, PartialEq)]
pub struct InfeasibleDetail {
    pub constraint: Constraint,
    pub round: usize,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolverError {
    #[error("{players} players exceeds the supported maximum")]
    ConfigTooLarge { players: usize },
    #[error("unknown player or role `{0}`")]
    UnknownName(String),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Settings(#[from] SettingsError),
    #[error("`{0}` is not a hard constraint")]
    NotHard(&'static str),
    #[error("expected a {expected:?} constraint, found {found:?}")]
    WrongClass { expected: ConstraintClass, found: ConstraintClass },
    #[error("hypothesis `{0}` requests an IG weight that has not been resolved")]
    UnresolvedWeight(&'static str),
    #[error("no world satisfies the hard constraints; `{}` in round {} emptied the set", .0.constraint.kind().type_name(), .0.round)]
    Infeasible(Box<InfeasibleDetail>),
    #[error("the IG context is infeasible; `{}` in round {} emptied the set", .0.constraint.kind().type_name(), .0.round)]
    InfeasibleContext(Box<InfeasibleDetail>),
    #[error("no world satisfies every assertion")]
    NoAssertionWorld,
    #[error("assertion `{0}` is false in the supplied truth")]
    UntruthfulAssertion(&'static str),
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("could not find a feasible starting world within {0} attempts")]
    NoInitialWorld(usize),
}

impl SolverError {
    pub fn code(&self) -> &'static str {
        match self {
            SolverError::ConfigTooLarge { .. } => "CONFIG_INVALID",
            SolverError::UnknownName(_) => "UNKNOWN_NAME",
            SolverError::Constraint(e) => e.code(),
            SolverError::Settings(_) => "BAD_SETTINGS",
            SolverError::NotHard(_) | SolverError::WrongClass { .. } => "WRONG_CLASS",
            SolverError::UnresolvedWeight(_) => "UNRESOLVED_WEIGHT",
            SolverError::Infeasible(_) | SolverError::NoAssertionWorld => "INFEASIBLE",
            SolverError::InfeasibleContext(_) => "INFEASIBLE_CONTEXT",
            SolverError::UntruthfulAssertion(_) => "UNTRUTHFUL_ASSERTION",
            SolverError::NotNormalized { .. } => "NOT_NORMALIZED",
            SolverError::NoInitialWorld(_) => "NO_INITIAL_WORLD",
        }
    }

    pub fn infeasible_detail(&self) -> Option<&InfeasibleDetail> {
        match self {
            SolverError::Infeasible(d) | SolverError::InfeasibleContext(d) => Some(d),
            _ => None,
        }
    }
}
