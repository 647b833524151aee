//! Metropolis-Hastings over feasible worlds with role-swap proposals.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ConstraintSet, GameConfig, SolverSettings, World};
use crate::scalar::Real;

use super::entropy::entropy_unchecked;
use super::posterior::{HypothesisWeight, Posterior, WeightedWorld, WorldSpace};
use super::predicate::{Predicate, RoleTable};
use super::score::SoftModel;
use super::SolverError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McmcOptions {
    pub samples: usize,
    pub seed: u64,
    /// Proposals discarded before the first recorded sample; defaults to `samples / 10`.
    pub burn_in: Option<usize>,
    /// Proposals per recorded sample; defaults to `4 * players`.
    pub thin: Option<usize>,
    /// Random shuffles tried when looking for a feasible start.
    pub start_attempts: usize,
}

impl McmcOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        McmcOptions { samples, seed, burn_in: None, thin: None, start_attempts: 100_000 }
    }
}

/// Approximate posterior from role-swap Metropolis-Hastings.
///
/// Worlds are the distinct sampled worlds in canonical order, with empirical
/// frequencies as probabilities and exact log scores. The MAP is the sampled
/// world with the highest score. IG presets resolve their hypothesis weights
/// exactly, which needs the enumerated feasible set.
pub fn mcmc_posterior<T: Real>(
    config: &GameConfig,
    constraints: &ConstraintSet,
    settings: &SolverSettings,
    options: &McmcOptions,
) -> Result<Posterior<T>, SolverError> {
    settings.validate()?;
    constraints.validate(config)?;
    if config.num_players() > crate::model::MAX_PLAYERS {
        return Err(SolverError::ConfigTooLarge { players: config.num_players() });
    }
    let table = RoleTable::new(config);
    let hard: Vec<Predicate> =
        constraints.hard_in_order().into_iter().map(|c| Predicate::compile(c, config)).collect::<Result<_, _>>()?;

    let (model, weights) = soft_model::<T>(config, constraints, settings)?;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let feasible = |w: &World| hard.iter().all(|p| p.holds(w, &table));
    let mut current = initial_world(config, &feasible, &mut rng, options.start_attempts)?;
    let mut current_log = model.log_score(&current, &table);

    let n = config.num_players();
    let thin = options.thin.unwrap_or(4 * n).max(1);
    let burn_in = options.burn_in.unwrap_or(options.samples / 10);
    let mut counts: BTreeMap<World, usize> = BTreeMap::new();

    let step = |current: &mut World, current_log: &mut T, rng: &mut ChaCha8Rng| {
        if n < 2 {
            return;
        }
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b || current.role(a) == current.role(b) {
            return;
        }
        current.swap(a, b);
        if !feasible(current) {
            current.swap(a, b);
            return;
        }
        let proposed = model.log_score(current, &table);
        let log_ratio = proposed - *current_log;
        let accept = log_ratio >= T::zero() || T::lit(rng.random::<f64>()).ln() < log_ratio;
        if accept {
            *current_log = proposed;
        } else {
            current.swap(a, b);
        }
    };

    for _ in 0..burn_in {
        step(&mut current, &mut current_log, &mut rng);
    }
    for _ in 0..options.samples {
        for _ in 0..thin {
            step(&mut current, &mut current_log, &mut rng);
        }
        *counts.entry(current.clone()).or_insert(0) += 1;
    }

    let total = T::count(options.samples.max(1));
    let mut marginals = vec![vec![T::zero(); config.num_roles()]; n];
    let mut worlds = Vec::with_capacity(counts.len());
    let mut map_index = 0;
    for (i, (world, count)) in counts.into_iter().enumerate() {
        let probability = T::count(count) / total;
        for (player, row) in marginals.iter_mut().enumerate() {
            row[world.role(player)] = row[world.role(player)] + probability;
        }
        let log_score = model.log_score(&world, &table);
        if i > 0 && log_score > worlds_log(&worlds, map_index) {
            map_index = i;
        }
        worlds.push(WeightedWorld { world, log_score, probability });
    }
    let entropy_bits = entropy_unchecked(worlds.iter().map(|w: &WeightedWorld<T>| w.probability));
    Ok(Posterior {
        feasible_count: worlds.len(),
        worlds,
        marginals,
        map_index,
        entropy_bits,
        active_assertions: model.num_assertions(),
        hypothesis_weights: weights,
    })
}

fn worlds_log<T: Real>(worlds: &[WeightedWorld<T>], i: usize) -> T {
    worlds[i].log_score
}

type Resolved<T> = (SoftModel<T>, Vec<HypothesisWeight<T>>);

fn soft_model<T: Real>(
    config: &GameConfig,
    constraints: &ConstraintSet,
    settings: &SolverSettings,
) -> Result<Resolved<T>, SolverError> {
    let space = WorldSpace::new(config.clone())?;
    let mut model = space.assertion_model::<T>(constraints, settings);
    let weights = if settings.preset.uses_ig() && !constraints.hypotheses().is_empty() {
        let feasible = space.feasible(constraints).map_err(|d| SolverError::Infeasible(Box::new(d)))?;
        space.resolve_hypotheses(&feasible, constraints, settings, constraints.latest_round(), &mut model)?
    } else {
        space.resolve_hypotheses(&[], constraints, settings, constraints.latest_round(), &mut model)?
    };
    Ok((model, weights))
}

fn initial_world(
    config: &GameConfig,
    feasible: &impl Fn(&World) -> bool,
    rng: &mut ChaCha8Rng,
    attempts: usize,
) -> Result<World, SolverError> {
    let mut roles: Vec<u8> =
        config.counts().iter().enumerate().flat_map(|(r, &c)| std::iter::repeat_n(r as u8, c)).collect();
    for _ in 0..attempts.max(1) {
        let w = World::from_raw(roles.clone());
        if feasible(&w) {
            return Ok(w);
        }
        roles.shuffle(rng);
    }
    Err(SolverError::NoInitialWorld(attempts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Constraint;
    use crate::solver::posterior;

    fn tv(exact: &Posterior<f64>, sampled: &Posterior<f64>) -> f64 {
        let mut map: BTreeMap<&World, (f64, f64)> = BTreeMap::new();
        for w in &exact.worlds {
            map.entry(&w.world).or_default().0 = w.probability;
        }
        for w in &sampled.worlds {
            map.entry(&w.world).or_default().1 = w.probability;
        }
        map.values().map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
    }

    #[test]
    fn single_feasible_world_is_always_sampled() {
        let cfg = GameConfig::avalon_six();
        let roles = ["merlin", "percival", "servant", "servant", "morgana", "assassin"];
        let set: ConstraintSet = cfg.players().iter().zip(roles).map(|(p, r)| Constraint::role_is(p, r)).collect();
        let p: Posterior<f64> =
            mcmc_posterior(&cfg, &set, &SolverSettings::default(), &McmcOptions::new(200, 1)).unwrap();
        assert_eq!(p.worlds.len(), 1);
        assert_eq!(p.worlds[0].probability, 1.0);
        for row in &p.marginals {
            assert!(row.iter().all(|&m| m == 0.0 || m == 1.0));
        }
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let cfg = GameConfig::avalon_six();
        let s = SolverSettings::default();
        let a: Posterior<f64> = mcmc_posterior(&cfg, &ConstraintSet::new(), &s, &McmcOptions::new(500, 9)).unwrap();
        let b: Posterior<f64> = mcmc_posterior(&cfg, &ConstraintSet::new(), &s, &McmcOptions::new(500, 9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_instance_is_close_to_exact() {
        let cfg = GameConfig::avalon_six();
        let mut set = ConstraintSet::new();
        set.push(Constraint::role_is("player-1", "merlin"));
        let s = SolverSettings::default();
        let exact: Posterior<f64> = posterior(&cfg, &set, &s).unwrap();
        let sampled: Posterior<f64> = mcmc_posterior(&cfg, &set, &s, &McmcOptions::new(20_000, 3)).unwrap();
        assert!(tv(&exact, &sampled) < 0.05);
    }

    #[test]
    fn impossible_start_is_reported() {
        let cfg = GameConfig::avalon_six();
        let mut set = ConstraintSet::new();
        set.push(Constraint::role_is("player-1", "merlin"));
        set.push(Constraint::role_is("player-2", "merlin"));
        let opts = McmcOptions { start_attempts: 50, ..McmcOptions::new(10, 0) };
        let err = mcmc_posterior::<f64>(&cfg, &set, &SolverSettings::default(), &opts).unwrap_err();
        assert_eq!(err.code(), "NO_INITIAL_WORLD");
    }
}
