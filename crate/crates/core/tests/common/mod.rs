//! Random instances and a name-based brute-force oracle shared by the
//! integration tests. The oracle deliberately shares no code with the solver.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rolecsp::{
    Alignment, Constraint, ConstraintClass, ConstraintKind, ConstraintSet, GameConfig, GameKind, Preset, RoleSpec,
    SetLabel, SolverSettings, World,
};

pub fn random_config(rng: &mut ChaCha8Rng, min_seats: usize, max_seats: usize) -> GameConfig {
    let seats = rng.random_range(min_seats..=max_seats);
    match rng.random_range(0..3) {
        0 => GameConfig::avalon(seats).expect("5..=10 seats"),
        1 => GameConfig::mafia(seats, rng.random_range(1..=(seats - 1) / 2)).unwrap(),
        _ => {
            let wolves = rng.random_range(1..=(seats - 2) / 2);
            let roles = vec![
                RoleSpec::new("seer", 1, Alignment::Good),
                RoleSpec::new("villager", seats - 1 - wolves, Alignment::Good),
                RoleSpec::new("wolf", wolves, Alignment::Evil),
            ];
            GameConfig::new(GameKind::Custom, (0..seats).map(|i| format!("seat{i}")), roles).unwrap()
        }
    }
}

pub fn random_truth(rng: &mut ChaCha8Rng, config: &GameConfig) -> World {
    let mut roles: Vec<usize> =
        config.counts().iter().enumerate().flat_map(|(r, &c)| std::iter::repeat_n(r, c)).collect();
    roles.shuffle(rng);
    World::from_indices(config, &roles).unwrap()
}

fn names(config: &GameConfig) -> Vec<String> {
    config.roles().iter().map(|r| r.name.clone()).collect()
}

fn random_team(rng: &mut ChaCha8Rng, config: &GameConfig) -> Vec<String> {
    let size = rng.random_range(1..=config.num_players().min(4));
    let mut players = config.players().to_vec();
    players.shuffle(rng);
    players.truncate(size);
    players
}

fn evil_in(config: &GameConfig, truth: &World, team: &[String]) -> usize {
    team.iter().filter(|p| truth.is_evil(config, config.player_index(p).unwrap())).count()
}

fn true_role(config: &GameConfig, truth: &World, player: &str) -> String {
    config.role_name(truth.role(config.player_index(player).unwrap())).to_string()
}

fn is_evil_name(config: &GameConfig, truth: &World, player: &str) -> bool {
    truth.is_evil(config, config.player_index(player).unwrap())
}

/// A hard constraint, true of `truth` when `truthful`.
pub fn random_hard(rng: &mut ChaCha8Rng, config: &GameConfig, truth: &World, truthful: bool) -> Constraint {
    let roles = names(config);
    let player = config.players().choose(rng).unwrap().clone();
    let actual = true_role(config, truth, &player);
    match rng.random_range(0..4) {
        0 => {
            let role = if truthful { actual } else { roles.choose(rng).unwrap().clone() };
            Constraint::role_is(&player, &role)
        }
        1 => {
            let others: Vec<&String> = roles.iter().filter(|r| **r != actual).collect();
            let role =
                if truthful { (*others.choose(rng).unwrap()).clone() } else { roles.choose(rng).unwrap().clone() };
            Constraint::role_not(&player, &role)
        }
        2 => {
            let mut set: Vec<String> = roles.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
            if truthful && !set.contains(&actual) {
                set.push(actual);
            }
            if set.is_empty() {
                set.push(roles.choose(rng).unwrap().clone());
            }
            Constraint::role_in(&player, &set)
        }
        _ => {
            let team = random_team(rng, config);
            let evil = evil_in(config, truth, &team);
            let min = if truthful && evil >= 1 { rng.random_range(1..=evil) } else { rng.random_range(1..=team.len()) };
            if truthful && evil == 0 {
                // No truthful evil_at_least on an all-good team; fall back.
                return Constraint::role_is(&player, &true_role(config, truth, &player));
            }
            Constraint::evil_at_least(&team, min)
        }
    }
}

fn random_label(rng: &mut ChaCha8Rng, config: &GameConfig) -> SetLabel {
    match rng.random_range(0..3) {
        0 => SetLabel::Good,
        1 => SetLabel::Evil,
        _ => SetLabel::Role(names(config).choose(rng).unwrap().clone()),
    }
}

fn label_holds(config: &GameConfig, truth: &World, target: &str, label: &SetLabel) -> bool {
    match label {
        SetLabel::Good => !is_evil_name(config, truth, target),
        SetLabel::Evil => is_evil_name(config, truth, target),
        SetLabel::Role(r) => true_role(config, truth, target) == *r,
    }
}

/// An assertion, true of `truth` when `truthful`.
pub fn random_assertion(rng: &mut ChaCha8Rng, config: &GameConfig, truth: &World, truthful: bool) -> Constraint {
    let speaker = config.players().choose(rng).unwrap().clone();
    let kind = match rng.random_range(0..3) {
        0 => {
            let role =
                if truthful { true_role(config, truth, &speaker) } else { names(config).choose(rng).unwrap().clone() };
            ConstraintKind::AssertRoleIs { speaker, role }
        }
        1 => {
            let mut team = random_team(rng, config);
            if truthful {
                team.retain(|p| !is_evil_name(config, truth, p));
                if team.is_empty() {
                    let good = config.players().iter().find(|p| !is_evil_name(config, truth, p)).unwrap();
                    team.push(good.clone());
                }
            }
            ConstraintKind::AssertTeamGood { speaker, team }
        }
        _ => {
            let target = config.players().choose(rng).unwrap().clone();
            let label = if truthful {
                let truthy: Vec<SetLabel> =
                    [SetLabel::Good, SetLabel::Evil, SetLabel::Role(true_role(config, truth, &target))]
                        .into_iter()
                        .filter(|l| label_holds(config, truth, &target, l))
                        .collect();
                truthy.choose(rng).unwrap().clone()
            } else {
                random_label(rng, config)
            };
            ConstraintKind::AssertRoleIn { speaker, target, set: label }
        }
    };
    Constraint::new(kind)
}

/// A hypothesis with a random weight, no weight, or the auto flag.
pub fn random_hypothesis(rng: &mut ChaCha8Rng, config: &GameConfig) -> Constraint {
    let speaker = config.players().choose(rng).unwrap().clone();
    let kind = match rng.random_range(0..3) {
        0 => ConstraintKind::HypoRoleIn {
            speaker,
            target: config.players().choose(rng).unwrap().clone(),
            set: random_label(rng, config),
        },
        1 => ConstraintKind::HypoTeamGood { speaker, team: random_team(rng, config) },
        _ => ConstraintKind::HypoTeamEvil { speaker, team: random_team(rng, config) },
    };
    let c = Constraint::new(kind);
    match rng.random_range(0..3) {
        0 => c.with_weight(rng.random_range(0.0..1.0)),
        1 => c.with_auto_weight(),
        _ => c,
    }
}

/// Truthful hard constraints plus random soft ones over rounds 1..=3. Its
/// hard part is always satisfied by `truth`.
pub fn random_instance(rng: &mut ChaCha8Rng, config: &GameConfig) -> (World, ConstraintSet) {
    let truth = random_truth(rng, config);
    let mut set = ConstraintSet::new();
    for _ in 0..rng.random_range(0..=3) {
        set.push(random_hard(rng, config, &truth, true).at_round(rng.random_range(1..=3)));
    }
    for _ in 0..rng.random_range(0..=2) {
        let truthful = rng.random_bool(0.7);
        set.push(random_assertion(rng, config, &truth, truthful).at_round(rng.random_range(1..=3)));
    }
    for _ in 0..rng.random_range(0..=4) {
        set.push(random_hypothesis(rng, config).at_round(rng.random_range(1..=3)));
    }
    (truth, set)
}

pub fn random_settings(rng: &mut ChaCha8Rng) -> SolverSettings {
    let mut s = SolverSettings::with_preset(*Preset::ALL.choose(rng).unwrap());
    if rng.random_bool(0.3) {
        s.global_scale = rng.random_range(0.5..2.0);
        s.ig_scale = rng.random_range(0.0..2.0);
    }
    s
}

// ---------------------------------------------------------------------------
// Oracle

/// A world as player name to role name.
pub type NamedWorld = BTreeMap<String, String>;

/// Every distinct assignment of the role multiset, by permuting the
/// expanded list of role names and dropping duplicates.
pub fn oracle_worlds(config: &GameConfig) -> Vec<NamedWorld> {
    let mut pool: Vec<String> = Vec::new();
    for r in config.roles() {
        for _ in 0..r.count {
            pool.push(r.name.clone());
        }
    }
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut current = Vec::new();
    let mut used = vec![false; pool.len()];
    permute(&pool, &mut used, &mut current, &mut seen);
    seen.into_iter().map(|roles| config.players().iter().cloned().zip(roles).collect()).collect()
}

fn permute(pool: &[String], used: &mut [bool], current: &mut Vec<String>, out: &mut BTreeSet<Vec<String>>) {
    if current.len() == pool.len() {
        out.insert(current.clone());
        return;
    }
    for i in 0..pool.len() {
        if !used[i] {
            used[i] = true;
            current.push(pool[i].clone());
            permute(pool, used, current, out);
            current.pop();
            used[i] = false;
        }
    }
}

fn evil_role(config: &GameConfig, role: &str) -> bool {
    config.roles().iter().any(|r| r.name == role && r.alignment == Alignment::Evil)
}

fn in_label(config: &GameConfig, role: &str, label: &SetLabel) -> bool {
    match label {
        SetLabel::Good => !evil_role(config, role),
        SetLabel::Evil => evil_role(config, role),
        SetLabel::Role(r) => r == role,
    }
}

/// Satisfaction by direct reading of the constraint catalogue.
pub fn oracle_holds(config: &GameConfig, w: &NamedWorld, c: &Constraint) -> bool {
    let evil = |p: &String| evil_role(config, &w[p]);
    match c.kind() {
        ConstraintKind::RoleIs { player, role } => w[player] == *role,
        ConstraintKind::RoleNot { player, role } => w[player] != *role,
        ConstraintKind::RoleIn { player, roles } => roles.contains(&w[player]),
        ConstraintKind::EvilAtLeast { team, min } => team.iter().filter(|p| evil(p)).count() >= *min,
        ConstraintKind::AssertRoleIs { speaker, role } => w[speaker] == *role,
        ConstraintKind::AssertTeamGood { team, .. } => team.iter().all(|p| !evil(p)),
        ConstraintKind::AssertRoleIn { target, set, .. } => in_label(config, &w[target], set),
        ConstraintKind::HypoRoleIn { target, set, .. } => in_label(config, &w[target], set),
        ConstraintKind::HypoTeamGood { team, .. } => team.iter().all(|p| !evil(p)),
        ConstraintKind::HypoTeamEvil { team, .. } => team.iter().any(evil),
    }
}

fn entropy2(ps: &[f64]) -> f64 {
    let total: f64 = ps.iter().sum();
    ps.iter().filter(|&&p| p > 0.0).map(|&p| -(p / total) * (p / total).log2()).sum()
}

pub struct OracleResult {
    pub feasible: Vec<NamedWorld>,
    pub probabilities: Vec<f64>,
    /// (player, role) to posterior mass.
    pub marginals: BTreeMap<(String, String), f64>,
}

/// Filter by every hard constraint, weight by the preset, normalize.
/// `None` when nothing survives the filter.
pub fn oracle_posterior(config: &GameConfig, set: &ConstraintSet, settings: &SolverSettings) -> Option<OracleResult> {
    let all: Vec<&Constraint> = set.iter().collect();
    let hard: Vec<&&Constraint> = all.iter().filter(|c| c.class().is_hard()).collect();
    let feasible: Vec<NamedWorld> =
        oracle_worlds(config).into_iter().filter(|w| hard.iter().all(|c| oracle_holds(config, w, c))).collect();
    if feasible.is_empty() {
        return None;
    }
    let lambda = settings.global_scale;
    let preset = settings.preset;
    let assertions: Vec<&&Constraint> = if preset == Preset::Strict {
        Vec::new()
    } else {
        all.iter().filter(|c| c.class() == ConstraintClass::Assertion).collect()
    };
    let assertion_factor = |w: &NamedWorld| -> f64 {
        assertions.iter().filter(|a| oracle_holds(config, w, a)).map(|_| lambda * settings.assertion_weight).product()
    };
    let latest = all.iter().map(|c| c.round()).max().unwrap_or(0);
    let hypotheses: Vec<&&Constraint> = all
        .iter()
        .filter(|c| c.class() == ConstraintClass::Hypothesis)
        .filter(|c| match preset {
            Preset::Strict | Preset::Assert => false,
            Preset::TurnIg => c.round() == latest,
            _ => true,
        })
        .collect();

    let prior: Vec<f64> = feasible.iter().map(assertion_factor).collect();
    let prior_entropy = entropy2(&prior);
    let weights: Vec<f64> = hypotheses
        .iter()
        .map(|h| match preset {
            Preset::HypM => {
                let m = &settings.manual_weights;
                let default = match h.kind() {
                    ConstraintKind::HypoTeamGood { .. } => m.strong,
                    ConstraintKind::HypoTeamEvil { .. } => m.low,
                    _ => m.mid,
                };
                lambda * h.weight().unwrap_or(default)
            }
            _ => {
                let kept: Vec<f64> =
                    feasible.iter().zip(&prior).filter(|(w, _)| oracle_holds(config, w, h)).map(|(_, p)| *p).collect();
                if kept.is_empty() {
                    return 0.0;
                }
                let ig = prior_entropy - entropy2(&kept);
                lambda * settings.ig_scale * ig.max(0.0)
            }
        })
        .collect();

    let scores: Vec<f64> = feasible
        .iter()
        .zip(&prior)
        .map(|(w, a)| {
            let bonus: f64 =
                hypotheses.iter().zip(&weights).filter(|(h, _)| oracle_holds(config, w, h)).map(|(_, x)| *x).sum();
            a * (1.0 + bonus)
        })
        .collect();
    let z: f64 = scores.iter().sum();
    let probabilities: Vec<f64> = scores.iter().map(|s| s / z).collect();
    let mut marginals = BTreeMap::new();
    for (w, p) in feasible.iter().zip(&probabilities) {
        for (player, role) in w {
            *marginals.entry((player.clone(), role.clone())).or_insert(0.0) += p;
        }
    }
    Some(OracleResult { feasible, probabilities, marginals })
}

/// Largest absolute difference between solver and oracle marginals.
pub fn marginal_gap(config: &GameConfig, solver: &[Vec<f64>], oracle: &OracleResult) -> f64 {
    let mut worst: f64 = 0.0;
    for (p, player) in config.players().iter().enumerate() {
        for (r, role) in config.roles().iter().enumerate() {
            let o = oracle.marginals.get(&(player.clone(), role.name.clone())).copied().unwrap_or(0.0);
            worst = worst.max((solver[p][r] - o).abs());
        }
    }
    worst
}
