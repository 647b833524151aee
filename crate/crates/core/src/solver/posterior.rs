use rayon::prelude::*;

use crate::model::{Constraint, ConstraintClass, ConstraintSet, GameConfig, SolverSettings, World};
use crate::scalar::Real;

use super::entropy::entropy_unchecked;
use super::ig::{IgContext, IgReport};
use super::predicate::{Predicate, RoleTable};
use super::score::SoftModel;
use super::{enumerate_worlds, InfeasibleDetail, SolverError};

// Below this many worlds, scoring stays on the calling thread.
const PARALLEL_MIN_WORLDS: usize = 8192;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedWorld<T> {
    pub world: World,
    /// Natural log of the score; `>= 0` because every score is `>= 1`.
    pub log_score: T,
    pub probability: T,
}

impl<T: Real> WeightedWorld<T> {
    pub fn score(&self) -> T {
        self.log_score.exp()
    }
}

/// The weight a hypothesis entered the score with, scaled by the global factor.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisWeight<T> {
    pub hypothesis: Constraint,
    pub applied_weight: T,
    pub ig: Option<IgReport<T>>,
}

/// Normalized distribution over the feasible worlds and everything derived from it.
#[derive(Clone, Debug, PartialEq)]
pub struct Posterior<T> {
    /// Feasible worlds in canonical order.
    pub worlds: Vec<WeightedWorld<T>>,
    /// Player x role, both in config order.
    pub marginals: Vec<Vec<T>>,
    /// Index into `worlds` of the first maximal-probability world.
    pub map_index: usize,
    pub entropy_bits: T,
    pub feasible_count: usize,
    pub active_assertions: usize,
    pub hypothesis_weights: Vec<HypothesisWeight<T>>,
}

impl<T: Real> Posterior<T> {
    pub fn map_world(&self) -> &World {
        &self.worlds[self.map_index].world
    }

    pub fn marginal(&self, player: usize, role: usize) -> T {
        self.marginals[player][role]
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.worlds.iter().map(|w| w.probability).collect()
    }

    /// The `k` most probable worlds; equal probabilities keep canonical order.
    pub fn top_k(&self, k: usize) -> Vec<&WeightedWorld<T>> {
        let mut idx: Vec<usize> = (0..self.worlds.len()).collect();
        idx.sort_by(|&a, &b| {
            self.worlds[b].log_score.partial_cmp(&self.worlds[a].log_score).expect("scores are finite").then(a.cmp(&b))
        });
        idx.into_iter().take(k).map(|i| &self.worlds[i]).collect()
    }

    pub fn active_hypotheses(&self) -> usize {
        self.hypothesis_weights.len()
    }
}

/// A config with its enumerated worlds, reusable across many solves.
#[derive(Clone, Debug)]
pub struct WorldSpace {
    config: GameConfig,
    worlds: Vec<World>,
    table: RoleTable,
}

impl WorldSpace {
    pub fn new(config: GameConfig) -> Result<Self, SolverError> {
        let worlds = enumerate_worlds(&config)?;
        let table = RoleTable::new(&config);
        Ok(WorldSpace { config, worlds, table })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub(crate) fn table(&self) -> &RoleTable {
        &self.table
    }

    /// Worlds satisfying every hard constraint in `constraints`. On an empty
    /// result, names the earliest constraint (by round, then evidence before
    /// phenomenon, then list order) whose incremental addition emptied the set.
    pub(crate) fn feasible(&self, constraints: &ConstraintSet) -> Result<Vec<&World>, InfeasibleDetail> {
        let hard = constraints.hard_in_order();
        let preds: Vec<Predicate> = hard
            .iter()
            .map(|c| Predicate::compile(c, &self.config))
            .collect::<Result<_, _>>()
            .expect("constraints are validated before solving");
        let mut current: Vec<&World> = self.worlds.iter().collect();
        for (c, p) in hard.iter().zip(&preds) {
            current.retain(|w| p.holds(w, &self.table));
            if current.is_empty() {
                return Err(InfeasibleDetail { constraint: (*c).clone(), round: c.round() });
            }
        }
        Ok(current)
    }

    /// Compiles the assertions active under the preset.
    pub(crate) fn assertion_model<T: Real>(
        &self,
        constraints: &ConstraintSet,
        settings: &SolverSettings,
    ) -> SoftModel<T> {
        let mut model = SoftModel::new(settings);
        if settings.preset.uses_assertions() {
            for a in constraints.assertions() {
                model.add_assertion(Predicate::compile(a, &self.config).expect("validated"));
            }
        }
        model
    }

    pub(crate) fn check(&self, constraints: &ConstraintSet, settings: &SolverSettings) -> Result<(), SolverError> {
        settings.validate()?;
        constraints.validate(&self.config)?;
        Ok(())
    }

    /// Full solve: prune, resolve hypothesis weights per preset, score,
    /// normalize, then marginals, MAP and entropy.
    pub fn posterior<T: Real>(
        &self,
        constraints: &ConstraintSet,
        settings: &SolverSettings,
    ) -> Result<Posterior<T>, SolverError> {
        self.posterior_at(constraints, settings, constraints.latest_round())
    }

    /// As [`WorldSpace::posterior`] with an explicit current round, which
    /// selects the hypotheses a current-round preset keeps.
    pub fn posterior_at<T: Real>(
        &self,
        constraints: &ConstraintSet,
        settings: &SolverSettings,
        current_round: usize,
    ) -> Result<Posterior<T>, SolverError> {
        self.check(constraints, settings)?;
        let feasible = self.feasible(constraints).map_err(|d| SolverError::Infeasible(Box::new(d)))?;
        let mut model = self.assertion_model::<T>(constraints, settings);
        let weights = self.resolve_hypotheses(&feasible, constraints, settings, current_round, &mut model)?;
        Ok(self.finish(&feasible, &model, weights))
    }

    /// Information gain of `h` under the current context, plus the posterior
    /// that would result from adding `h` with its applied weight. Does not
    /// modify anything.
    pub fn what_if<T: Real>(
        &self,
        constraints: &ConstraintSet,
        settings: &SolverSettings,
        h: &Constraint,
    ) -> Result<(IgReport<T>, Posterior<T>), SolverError> {
        self.check(constraints, settings)?;
        h.validate(&self.config)?;
        if h.class() != ConstraintClass::Hypothesis {
            return Err(SolverError::WrongClass { expected: ConstraintClass::Hypothesis, found: h.class() });
        }
        let feasible = self.feasible(constraints).map_err(|d| SolverError::Infeasible(Box::new(d)))?;
        let mut model = self.assertion_model::<T>(constraints, settings);
        let ctx = IgContext::new(self, &feasible, &model);
        let report = ctx.report(h, settings);
        let current = constraints.latest_round();
        let mut weights = self.resolve_hypotheses(&feasible, constraints, settings, current, &mut model)?;
        let scale = T::lit(settings.global_scale);
        model.add_hypothesis(Predicate::compile(h, &self.config)?, report.applied_weight / scale);
        weights.push(HypothesisWeight {
            hypothesis: h.clone(),
            applied_weight: report.applied_weight,
            ig: Some(report.clone()),
        });
        Ok((report, self.finish(&feasible, &model, weights)))
    }

    /// IG report for one hypothesis; the prior excludes every hypothesis in
    /// `context` and keeps its hard constraints plus preset-active assertions.
    pub fn info_gain<T: Real>(
        &self,
        h: &Constraint,
        context: &ConstraintSet,
        settings: &SolverSettings,
    ) -> Result<IgReport<T>, SolverError> {
        self.check(context, settings)?;
        h.validate(&self.config)?;
        if h.class() != ConstraintClass::Hypothesis {
            return Err(SolverError::WrongClass { expected: ConstraintClass::Hypothesis, found: h.class() });
        }
        let feasible = self.feasible(context).map_err(|d| SolverError::InfeasibleContext(Box::new(d)))?;
        let model = self.assertion_model::<T>(context, settings);
        Ok(IgContext::new(self, &feasible, &model).report(h, settings))
    }

    pub(crate) fn resolve_hypotheses<T: Real>(
        &self,
        feasible: &[&World],
        constraints: &ConstraintSet,
        settings: &SolverSettings,
        current: usize,
        model: &mut SoftModel<T>,
    ) -> Result<Vec<HypothesisWeight<T>>, SolverError> {
        let preset = settings.preset;
        if !preset.uses_hypotheses() {
            return Ok(Vec::new());
        }
        let active: Vec<&Constraint> =
            constraints.hypotheses().iter().filter(|h| !preset.current_round_only() || h.round() == current).collect();
        let scale = T::lit(settings.global_scale);
        let mut out = Vec::with_capacity(active.len());
        if preset.uses_ig() {
            let ctx = IgContext::new(self, feasible, model);
            let reports: Vec<IgReport<T>> = active.iter().map(|h| ctx.report(h, settings)).collect();
            for (h, report) in active.into_iter().zip(reports) {
                model.add_hypothesis(Predicate::compile(h, &self.config)?, report.applied_weight / scale);
                out.push(HypothesisWeight {
                    hypothesis: h.clone(),
                    applied_weight: report.applied_weight,
                    ig: Some(report),
                });
            }
        } else {
            for h in active {
                let w = T::lit(h.manual_weight(&settings.manual_weights));
                model.add_hypothesis(Predicate::compile(h, &self.config)?, w);
                out.push(HypothesisWeight { hypothesis: h.clone(), applied_weight: scale * w, ig: None });
            }
        }
        Ok(out)
    }

    pub(crate) fn log_scores<T: Real>(&self, feasible: &[&World], model: &SoftModel<T>) -> Vec<T> {
        if feasible.len() >= PARALLEL_MIN_WORLDS {
            feasible.par_iter().map(|w| model.log_score(w, &self.table)).collect()
        } else {
            feasible.iter().map(|w| model.log_score(w, &self.table)).collect()
        }
    }

    fn finish<T: Real>(
        &self,
        feasible: &[&World],
        model: &SoftModel<T>,
        hypothesis_weights: Vec<HypothesisWeight<T>>,
    ) -> Posterior<T> {
        let logs = self.log_scores(feasible, model);
        let probs = normalize_log_scores(&logs);

        let n = self.config.num_players();
        let mut marginals = vec![vec![T::zero(); self.config.num_roles()]; n];
        let mut map_index = 0;
        for (i, (w, p)) in feasible.iter().zip(&probs).enumerate() {
            for (player, row) in marginals.iter_mut().enumerate() {
                row[w.role(player)] = row[w.role(player)] + *p;
            }
            if logs[i] > logs[map_index] {
                map_index = i;
            }
        }
        let entropy_bits = entropy_unchecked(probs.iter().copied());
        let worlds = feasible
            .iter()
            .zip(logs)
            .zip(probs)
            .map(|((w, log_score), probability)| WeightedWorld { world: (*w).clone(), log_score, probability })
            .collect();
        Posterior {
            worlds,
            marginals,
            map_index,
            entropy_bits,
            feasible_count: feasible.len(),
            active_assertions: model.num_assertions(),
            hypothesis_weights,
        }
    }
}

/// Softmax over log scores, summed in input order.
pub(crate) fn normalize_log_scores<T: Real>(logs: &[T]) -> Vec<T> {
    let max = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let unnorm: Vec<T> = logs.iter().map(|l| (*l - max).exp()).collect();
    let z = unnorm.iter().fold(T::zero(), |acc, u| acc + *u);
    unnorm.into_iter().map(|u| u / z).collect()
}

/// One-shot solve over a freshly enumerated world space.
pub fn posterior<T: Real>(
    config: &GameConfig,
    constraints: &ConstraintSet,
    settings: &SolverSettings,
) -> Result<Posterior<T>, SolverError> {
    WorldSpace::new(config.clone())?.posterior(constraints, settings)
}
