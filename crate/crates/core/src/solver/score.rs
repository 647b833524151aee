use crate::model::{Constraint, ConstraintClass, GameConfig, SolverSettings, World};
use crate::scalar::Real;

use super::predicate::{Predicate, RoleTable};
use super::SolverError;

/// Soft part of the score, compiled once per solve.
///
/// Scores are handled in log space so that many satisfied assertions do not
/// overflow: `ln S = k ln(lambda w_A) + ln(1 + lambda * sum w_H)`.
#[derive(Clone, Debug)]
pub(crate) struct SoftModel<T> {
    assertions: Vec<Predicate>,
    hypotheses: Vec<(Predicate, T)>,
    log_assertion_factor: T,
    scale: T,
}

impl<T: Real> SoftModel<T> {
    pub(crate) fn new(settings: &SolverSettings) -> Self {
        SoftModel {
            assertions: Vec::new(),
            hypotheses: Vec::new(),
            log_assertion_factor: T::lit(settings.effective_assertion_weight()).ln(),
            scale: T::lit(settings.global_scale),
        }
    }

    pub(crate) fn add_assertion(&mut self, p: Predicate) {
        self.assertions.push(p);
    }

    /// `weight` is unscaled; the global scale is applied at scoring time.
    pub(crate) fn add_hypothesis(&mut self, p: Predicate, weight: T) {
        self.hypotheses.push((p, weight));
    }

    pub(crate) fn num_assertions(&self) -> usize {
        self.assertions.len()
    }

    pub(crate) fn num_hypotheses(&self) -> usize {
        self.hypotheses.len()
    }

    pub(crate) fn log_score(&self, world: &World, table: &RoleTable) -> T {
        let k = self.assertions.iter().filter(|p| p.holds(world, table)).count();
        let bonus: T = self.hypotheses.iter().filter(|(p, _)| p.holds(world, table)).map(|(_, w)| *w).sum();
        T::count(k) * self.log_assertion_factor + (self.scale * bonus).ln_1p()
    }
}

/// Weight of a hypothesis for direct scoring: its own weight, the kind
/// default when it has none, or an error when it still awaits an IG weight.
pub(crate) fn resolved_manual_weight(h: &Constraint, settings: &SolverSettings) -> Result<f64, SolverError> {
    if h.auto_weight() && h.weight().is_none() {
        return Err(SolverError::UnresolvedWeight(h.kind().type_name()));
    }
    Ok(h.manual_weight(&settings.manual_weights))
}

/// Score of one world:
/// `(prod over satisfied assertions of lambda w_A) * (1 + sum over satisfied hypotheses of lambda w_H)`.
pub fn score_world<T: Real>(
    config: &GameConfig,
    world: &World,
    assertions: &[Constraint],
    hypotheses: &[Constraint],
    settings: &SolverSettings,
) -> Result<T, SolverError> {
    let table = RoleTable::new(config);
    let scale = T::lit(settings.global_scale);
    let factor = T::lit(settings.effective_assertion_weight());
    let mut product = T::one();
    for a in assertions {
        if a.class() != ConstraintClass::Assertion {
            return Err(SolverError::WrongClass { expected: ConstraintClass::Assertion, found: a.class() });
        }
        if Predicate::compile(a, config)?.holds(world, &table) {
            product = product * factor;
        }
    }
    let mut sum = T::zero();
    for h in hypotheses {
        if h.class() != ConstraintClass::Hypothesis {
            return Err(SolverError::WrongClass { expected: ConstraintClass::Hypothesis, found: h.class() });
        }
        let w = resolved_manual_weight(h, settings)?;
        if Predicate::compile(h, config)?.holds(world, &table) {
            sum = sum + scale * T::lit(w);
        }
    }
    Ok(product * (T::one() + sum))
}
