use crate::model::{Constraint, ConstraintSet, GameConfig, SolverSettings, World};
use crate::scalar::Real;

use super::entropy::entropy_unchecked;
use super::posterior::{normalize_log_scores, WorldSpace};
use super::predicate::Predicate;
use super::score::SoftModel;
use super::SolverError;

#[derive(Clone, Debug, PartialEq)]
pub struct IgReport<T> {
    pub hypothesis: Constraint,
    pub prior_entropy_bits: T,
    pub posterior_entropy_bits: T,
    pub ig_bits: T,
    /// `lambda * beta * max(ig_bits, 0)`.
    pub applied_weight: T,
    /// No prior-feasible world satisfies the hypothesis.
    pub vacuous: bool,
}

/// Prior distribution shared by every hypothesis evaluated against one context.
pub(crate) struct IgContext<'a, T> {
    space: &'a WorldSpace,
    feasible: &'a [&'a World],
    prior: Vec<T>,
    prior_entropy: T,
}

impl<'a, T: Real> IgContext<'a, T> {
    /// `model` must hold the preset-active assertions and no hypotheses.
    pub(crate) fn new(space: &'a WorldSpace, feasible: &'a [&'a World], model: &SoftModel<T>) -> Self {
        debug_assert_eq!(model.num_hypotheses(), 0);
        let prior = normalize_log_scores(&space.log_scores(feasible, model));
        let prior_entropy = entropy_unchecked(prior.iter().copied());
        IgContext { space, feasible, prior, prior_entropy }
    }

    pub(crate) fn report(&self, h: &Constraint, settings: &SolverSettings) -> IgReport<T> {
        let pred = Predicate::compile(h, self.space.config()).expect("hypothesis validated against config");
        let table = self.space.table();
        let kept: Vec<T> =
            self.feasible.iter().zip(&self.prior).filter(|(w, _)| pred.holds(w, table)).map(|(_, p)| *p).collect();
        let vacuous = kept.is_empty();
        let posterior_entropy = if vacuous || kept.len() == self.prior.len() {
            // Nothing to condition on, or conditioning is the identity.
            self.prior_entropy
        } else {
            let z = kept.iter().fold(T::zero(), |acc, p| acc + *p);
            entropy_unchecked(kept.iter().map(|p| *p / z))
        };
        let ig = self.prior_entropy - posterior_entropy;
        let applied = if vacuous {
            T::zero()
        } else {
            T::lit(settings.global_scale) * T::lit(settings.ig_scale) * ig.max(T::zero())
        };
        IgReport {
            hypothesis: h.clone(),
            prior_entropy_bits: self.prior_entropy,
            posterior_entropy_bits: posterior_entropy,
            ig_bits: ig,
            applied_weight: applied,
            vacuous,
        }
    }
}

/// Information gain of hypothesis `h` given `context`.
pub fn info_gain<T: Real>(
    h: &Constraint,
    config: &GameConfig,
    context: &ConstraintSet,
    settings: &SolverSettings,
) -> Result<IgReport<T>, SolverError> {
    WorldSpace::new(config.clone())?.info_gain(h, context, settings)
}
