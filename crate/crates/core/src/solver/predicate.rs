//! Constraints compiled against a config into index-based predicates.

use crate::model::{Alignment, Constraint, ConstraintKind, GameConfig, SetLabel, World};

use super::SolverError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Predicate {
    /// The player's role is in the bitmask.
    RoleIn {
        player: usize,
        mask: u64,
    },
    EvilAtLeast {
        team: Vec<usize>,
        min: usize,
    },
    AllGood {
        team: Vec<usize>,
    },
    AnyEvil {
        team: Vec<usize>,
    },
}

/// Alignment lookup shared by all predicates of one config.
#[derive(Clone, Debug)]
pub(crate) struct RoleTable {
    evil: Vec<bool>,
}

impl RoleTable {
    pub(crate) fn new(config: &GameConfig) -> Self {
        RoleTable { evil: (0..config.num_roles()).map(|r| config.alignment(r) == Alignment::Evil).collect() }
    }

    #[inline]
    fn is_evil(&self, world: &World, player: usize) -> bool {
        self.evil[world.raw()[player] as usize]
    }
}

fn player(config: &GameConfig, name: &str) -> Result<usize, SolverError> {
    config.player_index(name).ok_or_else(|| SolverError::UnknownName(name.to_string()))
}

fn role_bit(config: &GameConfig, name: &str) -> Result<u64, SolverError> {
    config.role_index(name).map(|r| 1u64 << r).ok_or_else(|| SolverError::UnknownName(name.to_string()))
}

fn team(config: &GameConfig, names: &[String]) -> Result<Vec<usize>, SolverError> {
    names.iter().map(|n| player(config, n)).collect()
}

fn label_mask(config: &GameConfig, label: &SetLabel) -> Result<u64, SolverError> {
    let aligned =
        |a: Alignment| (0..config.num_roles()).filter(|&r| config.alignment(r) == a).fold(0u64, |m, r| m | 1 << r);
    match label {
        SetLabel::Good => Ok(aligned(Alignment::Good)),
        SetLabel::Evil => Ok(aligned(Alignment::Evil)),
        SetLabel::Role(r) => role_bit(config, r),
    }
}

impl Predicate {
    pub(crate) fn compile(c: &Constraint, config: &GameConfig) -> Result<Self, SolverError> {
        use ConstraintKind::*;
        let all_roles = (1u64 << config.num_roles()) - 1;
        Ok(match c.kind() {
            RoleIs { player: p, role } | AssertRoleIs { speaker: p, role } => {
                Predicate::RoleIn { player: player(config, p)?, mask: role_bit(config, role)? }
            }
            RoleNot { player: p, role } => {
                Predicate::RoleIn { player: player(config, p)?, mask: all_roles & !role_bit(config, role)? }
            }
            RoleIn { player: p, roles } => {
                let mut mask = 0;
                for r in roles {
                    mask |= role_bit(config, r)?;
                }
                Predicate::RoleIn { player: player(config, p)?, mask }
            }
            EvilAtLeast { team: t, min } => Predicate::EvilAtLeast { team: team(config, t)?, min: *min },
            AssertTeamGood { team: t, .. } | HypoTeamGood { team: t, .. } => {
                Predicate::AllGood { team: team(config, t)? }
            }
            HypoTeamEvil { team: t, .. } => Predicate::AnyEvil { team: team(config, t)? },
            AssertRoleIn { target, set, .. } | HypoRoleIn { target, set, .. } => {
                Predicate::RoleIn { player: player(config, target)?, mask: label_mask(config, set)? }
            }
        })
    }

    #[inline]
    pub(crate) fn holds(&self, world: &World, table: &RoleTable) -> bool {
        match self {
            Predicate::RoleIn { player, mask } => mask & (1u64 << world.raw()[*player]) != 0,
            Predicate::EvilAtLeast { team, min } => team.iter().filter(|&&p| table.is_evil(world, p)).count() >= *min,
            Predicate::AllGood { team } => team.iter().all(|&p| !table.is_evil(world, p)),
            Predicate::AnyEvil { team } => team.iter().any(|&p| table.is_evil(world, p)),
        }
    }
}

/// Returns exactly the worlds satisfying every hard constraint, order preserved.
pub fn apply_hard(config: &GameConfig, worlds: &[World], hard: &[Constraint]) -> Result<Vec<World>, SolverError> {
    let table = RoleTable::new(config);
    let preds =
        hard.iter()
            .map(|c| {
                if c.is_hard() {
                    Predicate::compile(c, config)
                } else {
                    Err(SolverError::NotHard(c.kind().type_name()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
    Ok(worlds.iter().filter(|w| preds.iter().all(|p| p.holds(w, &table))).cloned().collect())
}

/// Whether one constraint holds in one world.
pub fn satisfies(config: &GameConfig, world: &World, c: &Constraint) -> Result<bool, SolverError> {
    Ok(Predicate::compile(c, config)?.holds(world, &RoleTable::new(config)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::enumerate_worlds;

    fn team(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fixing_one_role_leaves_sixty() {
        let cfg = GameConfig::avalon_six();
        let all = enumerate_worlds(&cfg).unwrap();
        let out = apply_hard(&cfg, &all, &[Constraint::role_is("player-3", "merlin")]).unwrap();
        assert_eq!(out.len(), 60);
    }

    #[test]
    fn evil_on_a_pair_by_brute_count() {
        let cfg = GameConfig::avalon_six();
        let all = enumerate_worlds(&cfg).unwrap();
        // Independent count: worlds where player-1 or player-2 holds an evil role.
        let brute = all
            .iter()
            .filter(|w| {
                let names = w.role_names(&cfg);
                ["morgana", "assassin"].contains(&names[0]) || ["morgana", "assassin"].contains(&names[1])
            })
            .count();
        assert_eq!(brute, 216);
        let c = Constraint::evil_at_least(&team(&["player-1", "player-2"]), 1);
        assert_eq!(apply_hard(&cfg, &all, &[c]).unwrap().len(), 216);
    }

    #[test]
    fn contradiction_empties_the_set() {
        let cfg = GameConfig::avalon_six();
        let all = enumerate_worlds(&cfg).unwrap();
        let hard = [Constraint::role_is("player-1", "merlin"), Constraint::role_not("player-1", "merlin")];
        assert!(apply_hard(&cfg, &all, &hard).unwrap().is_empty());
    }

    #[test]
    fn role_in_singleton_and_complement_match_is_and_not() {
        let cfg = GameConfig::avalon_six();
        let all = enumerate_worlds(&cfg).unwrap();
        let is = apply_hard(&cfg, &all, &[Constraint::role_is("player-2", "percival")]).unwrap();
        let in1 = apply_hard(&cfg, &all, &[Constraint::role_in("player-2", &team(&["percival"]))]).unwrap();
        assert_eq!(is, in1);
        let not = apply_hard(&cfg, &all, &[Constraint::role_not("player-2", "percival")]).unwrap();
        let others = team(&["merlin", "servant", "morgana", "assassin"]);
        let in_c = apply_hard(&cfg, &all, &[Constraint::role_in("player-2", &others)]).unwrap();
        assert_eq!(not, in_c);
    }

    #[test]
    fn soft_constraints_are_rejected() {
        let cfg = GameConfig::avalon_six();
        let a = Constraint::new(ConstraintKind::AssertRoleIs { speaker: "player-1".into(), role: "merlin".into() });
        assert!(matches!(apply_hard(&cfg, &[], &[a]), Err(SolverError::NotHard("assert_role_is"))));
    }

    #[test]
    fn team_predicates() {
        let cfg = GameConfig::avalon_six();
        // merlin, percival, servant, servant, morgana, assassin
        let w = World::from_indices(&cfg, &[0, 1, 2, 2, 3, 4]).unwrap();
        let good = Constraint::new(ConstraintKind::HypoTeamGood {
            speaker: "player-6".into(),
            team: team(&["player-1", "player-3"]),
        });
        let evil = Constraint::new(ConstraintKind::HypoTeamEvil {
            speaker: "player-6".into(),
            team: team(&["player-1", "player-5"]),
        });
        let none = Constraint::new(ConstraintKind::HypoTeamEvil {
            speaker: "player-6".into(),
            team: team(&["player-1", "player-2"]),
        });
        assert!(satisfies(&cfg, &w, &good).unwrap());
        assert!(satisfies(&cfg, &w, &evil).unwrap());
        assert!(!satisfies(&cfg, &w, &none).unwrap());
        let lab = Constraint::new(ConstraintKind::HypoRoleIn {
            speaker: "player-1".into(),
            target: "player-6".into(),
            set: SetLabel::Evil,
        });
        assert!(satisfies(&cfg, &w, &lab).unwrap());
    }
}
