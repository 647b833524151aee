//! Synthetic game records for offline end-to-end runs.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::constraint_set_to_value;
use crate::ingestion::{
    Assassination, Ballot, Condition, GameRecord, Proposal, QuestResult, Reveal, RoundEvents, Vote, VoteTarget,
};
use crate::model::{Alignment, Constraint, ConstraintKind, ConstraintSet, GameConfig, GameKind, SetLabel, World};

/// Behaviour rates for generated players.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthOptions {
    /// Chance a good player states their own role in a round.
    pub claim_rate: f64,
    /// Chance an evil player claims a good role in a round.
    pub evil_claim_rate: f64,
    /// Chance any player voices a suspicion in a round.
    pub hypothesis_rate: f64,
    /// Chance a good player's suspicion is right.
    pub belief_accuracy: f64,
    /// Chance an evil player on a quest plays a fail.
    pub fail_rate: f64,
    /// Rounds for Mafia and custom tables; Avalon stops at three wins.
    pub max_rounds: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            claim_rate: 0.5,
            evil_claim_rate: 0.4,
            hypothesis_rate: 0.5,
            belief_accuracy: 0.7,
            fail_rate: 0.8,
            max_rounds: 5,
        }
    }
}

/// `count` games on `config`, reproducible from `seed`.
///
/// Good players' assertions are true except that under `Condition::Lie`
/// each game carries at least one false one. Evil players claim good roles.
pub fn synth_games(
    config: &GameConfig,
    count: usize,
    seed: u64,
    condition: Condition,
    options: &SynthOptions,
) -> Vec<GameRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut g = Game::new(config, &mut rng);
            let mut rounds = match config.kind() {
                GameKind::Avalon => g.avalon_rounds(&mut rng, options),
                GameKind::Mafia => g.mafia_rounds(&mut rng, options),
                GameKind::Custom => (1..=options.max_rounds.max(1)).map(RoundEvents::new).collect(),
            };
            let mut claims: Vec<Vec<Constraint>> = rounds
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let alive = g.alive_by_round.get(k).cloned().unwrap_or_else(|| vec![true; g.alive.len()]);
                    g.claims(&mut rng, options, r.index, condition, &alive)
                })
                .collect();
            if condition == Condition::Lie && !claims.iter().flatten().any(|c| g.is_good_lie(c)) {
                let k = rng.random_range(0..claims.len());
                let lie = g.forced_lie(&mut rng);
                claims[k].push(lie);
            }
            for (round, cs) in rounds.iter_mut().zip(claims) {
                if !cs.is_empty() {
                    round.constraints = Some(constraint_set_to_value(&cs.into_iter().collect::<ConstraintSet>()));
                }
            }
            let mut record = GameRecord {
                id: format!("synth-{seed}-{i:04}"),
                config: config.clone(),
                rounds,
                truth: None,
                condition: Some(condition),
            };
            record.set_truth(&g.truth);
            record
        })
        .collect()
}

struct Game<'a> {
    config: &'a GameConfig,
    truth: World,
    alive: Vec<bool>,
    /// Who could speak in each Mafia day.
    alive_by_round: Vec<Vec<bool>>,
}

impl<'a> Game<'a> {
    fn new(config: &'a GameConfig, rng: &mut ChaCha8Rng) -> Self {
        let mut roles: Vec<usize> =
            config.counts().iter().enumerate().flat_map(|(r, &c)| std::iter::repeat_n(r, c)).collect();
        roles.shuffle(rng);
        let truth = World::from_indices(config, &roles).expect("a shuffled multiset is a world");
        Game { config, truth, alive: vec![true; config.num_players()], alive_by_round: Vec::new() }
    }

    fn name(&self, p: usize) -> &str {
        &self.config.players()[p]
    }

    fn role(&self, p: usize) -> &str {
        self.config.role_name(self.truth.role(p))
    }

    fn evil(&self, p: usize) -> bool {
        self.truth.is_evil(self.config, p)
    }

    fn living(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&p| self.alive[p]).collect()
    }

    fn player_index(&self, name: &str) -> usize {
        self.config.player_index(name).expect("generated names exist")
    }

    fn avalon_rounds(&mut self, rng: &mut ChaCha8Rng, o: &SynthOptions) -> Vec<RoundEvents> {
        let n = self.config.num_players();
        let sizes: [usize; 5] = match n {
            5 => [2, 3, 2, 3, 3],
            6 => [2, 3, 4, 3, 4],
            7 => [2, 3, 3, 4, 4],
            _ => [3, 4, 4, 5, 5],
        };
        let (mut wins, mut losses) = (0, 0);
        let mut out = Vec::new();
        for (q, &size) in sizes.iter().enumerate() {
            let mut round = RoundEvents::new(q + 1);
            let leader = q % n;
            let mut others: Vec<usize> = (0..n).filter(|&p| p != leader).collect();
            others.shuffle(rng);
            let mut team = vec![leader];
            team.extend(others.into_iter().take(size - 1));
            team.sort_unstable();
            let names: Vec<String> = team.iter().map(|&p| self.name(p).to_string()).collect();
            round.proposals.push(Proposal { proposer: self.name(leader).into(), team: names.clone() });
            let has_evil = team.iter().any(|&p| self.evil(p));
            for p in 0..n {
                let yes = if self.evil(p) { has_evil } else { rng.random_bool(0.6) };
                round.votes.push(Vote {
                    voter: self.name(p).into(),
                    target: VoteTarget::Team(names.clone()),
                    vote: if yes { Ballot::Yes } else { Ballot::No },
                });
            }
            let fails = team.iter().filter(|&&p| self.evil(p) && rng.random_bool(o.fail_rate)).count();
            round.quest_result = Some(QuestResult { team: names, fail_count: fails });
            if fails == 0 {
                wins += 1;
            } else {
                losses += 1;
            }
            if wins == 3 {
                if let Some(killer) = (0..n).find(|&p| self.role(p) == "assassin") {
                    let goods: Vec<usize> = (0..n).filter(|&p| !self.evil(p)).collect();
                    let merlin = (0..n).find(|&p| self.role(p) == "merlin");
                    let target = match merlin {
                        Some(m) if rng.random_bool(0.3) => m,
                        _ => *goods.choose(rng).expect("boards have good players"),
                    };
                    round.assassination = Some(Assassination {
                        killer: self.name(killer).into(),
                        target: self.name(target).into(),
                        hit: Some(target) == merlin,
                    });
                }
            }
            out.push(round);
            if wins == 3 || losses == 3 {
                break;
            }
        }
        out
    }

    fn mafia_rounds(&mut self, rng: &mut ChaCha8Rng, o: &SynthOptions) -> Vec<RoundEvents> {
        let mut out = Vec::new();
        for day in 1..=o.max_rounds.max(1) {
            let mut round = RoundEvents::new(day);
            let bystanders: Vec<usize> = self.living().into_iter().filter(|&p| !self.evil(p)).collect();
            if let Some(&victim) = bystanders.choose(rng) {
                round.night_kill = Some(self.name(victim).into());
                self.alive[victim] = false;
            }
            self.alive_by_round.push(self.alive.clone());
            let living = self.living();
            let mut tally = vec![0usize; self.alive.len()];
            for &p in &living {
                let pool: Vec<usize> = living.iter().copied().filter(|&q| q != p).collect();
                let wanted: Vec<usize> = if self.evil(p) {
                    pool.iter().copied().filter(|&q| !self.evil(q)).collect()
                } else if rng.random_bool(o.belief_accuracy) {
                    pool.iter().copied().filter(|&q| self.evil(q)).collect()
                } else {
                    pool.clone()
                };
                let Some(&target) = wanted.choose(rng).or_else(|| pool.choose(rng)) else { continue };
                tally[target] += 1;
                round.votes.push(Vote {
                    voter: self.name(p).into(),
                    target: VoteTarget::Player(self.name(target).into()),
                    vote: Ballot::Yes,
                });
            }
            let lynched = living.iter().copied().max_by_key(|&p| (tally[p], std::cmp::Reverse(p)));
            if let Some(p) = lynched.filter(|&p| tally[p] > 0) {
                round.reveals.push(Reveal { player: self.name(p).into(), role: self.role(p).into() });
                self.alive[p] = false;
            }
            out.push(round);
            let living = self.living();
            let evil = living.iter().filter(|&&p| self.evil(p)).count();
            if evil == 0 || evil >= living.len() - evil {
                break;
            }
        }
        out
    }

    /// Round claims. Good players speak truthfully unless lying is allowed
    /// and chosen; evil players pose as good.
    fn claims(
        &self,
        rng: &mut ChaCha8Rng,
        o: &SynthOptions,
        round: usize,
        condition: Condition,
        alive: &[bool],
    ) -> Vec<Constraint> {
        let good_roles = self.config.roles_aligned(Alignment::Good);
        let living: Vec<usize> = (0..alive.len()).filter(|&p| alive[p]).collect();
        let mut out = Vec::new();
        for &p in &living {
            let me = self.name(p).to_string();
            if self.evil(p) {
                if rng.random_bool(o.evil_claim_rate) {
                    let role = good_roles.choose(rng).expect("boards have good roles");
                    out.push(Constraint::new(ConstraintKind::AssertRoleIs { speaker: me.clone(), role: role.clone() }));
                }
            } else if rng.random_bool(o.claim_rate) {
                if condition == Condition::Lie && rng.random_bool(0.2) {
                    out.push(self.lie_from(rng, p));
                } else {
                    out.push(Constraint::new(ConstraintKind::AssertRoleIs {
                        speaker: me.clone(),
                        role: self.role(p).into(),
                    }));
                }
            }
            if rng.random_bool(o.hypothesis_rate) {
                let others: Vec<usize> = living.iter().copied().filter(|&q| q != p).collect();
                let Some(&target) = others.choose(rng) else { continue };
                let right =
                    if self.evil(p) { false } else { self.role(p) == "merlin" || rng.random_bool(o.belief_accuracy) };
                let truly_evil = self.evil(target);
                let set = if truly_evil == right { SetLabel::Evil } else { SetLabel::Good };
                out.push(
                    Constraint::new(ConstraintKind::HypoRoleIn { speaker: me, target: self.name(target).into(), set })
                        .at_round(round),
                );
            }
        }
        out
    }

    /// A false assertion by good player `p`: accusing another good player.
    fn lie_from(&self, rng: &mut ChaCha8Rng, p: usize) -> Constraint {
        let goods: Vec<usize> = (0..self.alive.len()).filter(|&q| q != p && !self.evil(q)).collect();
        let target = *goods.choose(rng).expect("boards have two good players");
        Constraint::new(ConstraintKind::AssertRoleIn {
            speaker: self.name(p).into(),
            target: self.name(target).into(),
            set: SetLabel::Evil,
        })
    }

    fn forced_lie(&self, rng: &mut ChaCha8Rng) -> Constraint {
        let goods: Vec<usize> = (0..self.alive.len()).filter(|&q| !self.evil(q)).collect();
        let p = *goods.choose(rng).expect("boards have good players");
        self.lie_from(rng, p)
    }

    /// Whether `c` is an assertion by a good player that the truth violates.
    fn is_good_lie(&self, c: &Constraint) -> bool {
        match c.kind() {
            ConstraintKind::AssertRoleIs { speaker, role } => {
                let p = self.player_index(speaker);
                !self.evil(p) && self.role(p) != role
            }
            ConstraintKind::AssertRoleIn { speaker, target, set } => {
                let p = self.player_index(speaker);
                let t = self.player_index(target);
                let holds = match set {
                    SetLabel::Good => !self.evil(t),
                    SetLabel::Evil => self.evil(t),
                    SetLabel::Role(r) => self.role(t) == r,
                };
                !self.evil(p) && !holds
            }
            _ => false,
        }
    }
}
