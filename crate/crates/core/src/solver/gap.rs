//! Soft versus hard treatment of truthful assertions.

use crate::model::{Constraint, ConstraintClass, GameConfig, SolverSettings, World};
use crate::scalar::Real;

use super::posterior::{normalize_log_scores, WorldSpace};
use super::predicate::Predicate;
use super::score::{resolved_manual_weight, SoftModel};
use super::SolverError;

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport<T> {
    /// `max_a |Pr_soft(a) - Pr_hard(a)|`, with `Pr_hard = 0` outside the assertion set.
    pub max_abs_gap: T,
    /// `1 / (lambda w_A)`.
    pub bound: T,
    /// Soft-posterior mass outside the assertion set; `max_abs_gap` never exceeds it.
    pub outside_mass: T,
    /// `N_out * M / (lambda w_A * N_in)` with `M = 1 + lambda * sum w_H`; always `>= outside_mass`.
    pub counting_bound: T,
    /// Worlds satisfying every assertion.
    pub inside_count: usize,
    pub outside_count: usize,
}

impl<T: Real> GapReport<T> {
    pub fn within_bound(&self) -> bool {
        self.max_abs_gap <= self.bound
    }
}

/// Compares the posterior with assertions as weighted soft constraints to the
/// posterior with the same assertions as hard filters. Hypotheses carry their
/// manual weights in both. Every assertion must hold in `truth`.
pub fn soft_hard_gap<T: Real>(
    config: &GameConfig,
    truth: &World,
    assertions: &[Constraint],
    hypotheses: &[Constraint],
    settings: &SolverSettings,
) -> Result<GapReport<T>, SolverError> {
    settings.validate()?;
    let space = WorldSpace::new(config.clone())?;
    let table = space.table();
    let mut soft = SoftModel::<T>::new(settings);
    let mut weights_only = SoftModel::<T>::new(settings);
    let mut asserted = Vec::with_capacity(assertions.len());
    for a in assertions {
        if a.class() != ConstraintClass::Assertion {
            return Err(SolverError::WrongClass { expected: ConstraintClass::Assertion, found: a.class() });
        }
        a.validate(config)?;
        let p = Predicate::compile(a, config)?;
        if !p.holds(truth, table) {
            return Err(SolverError::UntruthfulAssertion(a.kind().type_name()));
        }
        soft.add_assertion(p.clone());
        asserted.push(p);
    }
    let mut weight_sum = 0.0;
    for h in hypotheses {
        if h.class() != ConstraintClass::Hypothesis {
            return Err(SolverError::WrongClass { expected: ConstraintClass::Hypothesis, found: h.class() });
        }
        h.validate(config)?;
        let w = resolved_manual_weight(h, settings)?;
        weight_sum += w;
        let p = Predicate::compile(h, config)?;
        soft.add_hypothesis(p.clone(), T::lit(w));
        weights_only.add_hypothesis(p, T::lit(w));
    }

    let all: Vec<&World> = space.worlds().iter().collect();
    let inside_mask: Vec<bool> = all.iter().map(|w| asserted.iter().all(|p| p.holds(w, table))).collect();
    let inside: Vec<&World> = all.iter().zip(&inside_mask).filter(|(_, m)| **m).map(|(w, _)| *w).collect();
    if inside.is_empty() {
        return Err(SolverError::NoAssertionWorld);
    }

    let pr_soft = normalize_log_scores(&space.log_scores(&all, &soft));
    let pr_hard_inside = normalize_log_scores(&space.log_scores(&inside, &weights_only));

    let mut gap = T::zero();
    let mut outside_mass = T::zero();
    let mut hard_iter = pr_hard_inside.into_iter();
    for (ps, is_in) in pr_soft.iter().zip(&inside_mask) {
        let ph = if *is_in { hard_iter.next().expect("aligned") } else { T::zero() };
        if !*is_in {
            outside_mass = outside_mass + *ps;
        }
        gap = gap.max((*ps - ph).abs());
    }

    let w = T::lit(settings.effective_assertion_weight());
    let n_in = inside.len();
    let n_out = all.len() - n_in;
    let m = T::one() + T::lit(settings.global_scale * weight_sum);
    Ok(GapReport {
        max_abs_gap: gap,
        bound: T::one() / w,
        outside_mass,
        counting_bound: T::count(n_out) * m / (w * T::count(n_in)),
        inside_count: n_in,
        outside_count: n_out,
    })
}
