//! Programmatic extraction from structured game events.

use crate::grammar::parse_document_value;
use crate::model::{Constraint, ConstraintKind, ConstraintSet, GameKind, ManualWeights, SetLabel};

use super::record::{Ballot, GameRecord, RoundEvents, VoteTarget};
use super::IngestError;

/// Avalon rules with the default manual weights.
pub fn extract_avalon_events(record: &GameRecord) -> Result<Vec<ConstraintSet>, IngestError> {
    extract_avalon_events_with(record, &ManualWeights::default())
}

/// One set per round. Proposals give `hypo_team_good` at the strong weight;
/// YES votes give `hypo_team_good` and NO votes `hypo_team_evil`, both at the
/// low weight. A quest with `f >= 1` fails gives `evil_at_least(team, f)`.
/// The assassination fixes the killer as assassin and the target as merlin
/// (hit) or not merlin (miss).
pub fn extract_avalon_events_with(
    record: &GameRecord,
    weights: &ManualWeights,
) -> Result<Vec<ConstraintSet>, IngestError> {
    if record.config.kind() != GameKind::Avalon {
        return Err(IngestError::BadRecord("Avalon extraction on a non-Avalon record".into()));
    }
    record.validate()?;
    record
        .rounds
        .iter()
        .map(|round| {
            let mut out = Vec::new();
            for p in &round.proposals {
                out.push(
                    Constraint::new(ConstraintKind::HypoTeamGood { speaker: p.proposer.clone(), team: p.team.clone() })
                        .with_weight(weights.strong),
                );
            }
            for v in &round.votes {
                let team = match &v.target {
                    VoteTarget::Team(t) => t.clone(),
                    VoteTarget::Player(p) => vec![p.clone()],
                };
                let kind = match v.vote {
                    Ballot::Yes => ConstraintKind::HypoTeamGood { speaker: v.voter.clone(), team },
                    Ballot::No => ConstraintKind::HypoTeamEvil { speaker: v.voter.clone(), team },
                };
                out.push(Constraint::new(kind).with_weight(weights.low));
            }
            if let Some(q) = &round.quest_result {
                if q.fail_count >= 1 {
                    out.push(Constraint::evil_at_least(&q.team, q.fail_count));
                }
            }
            if let Some(a) = &round.assassination {
                out.push(Constraint::role_is(&a.killer, "assassin"));
                out.push(if a.hit {
                    Constraint::role_is(&a.target, "merlin")
                } else {
                    Constraint::role_not(&a.target, "merlin")
                });
            }
            push_reveals(round, &mut out);
            finish_round(record, round, out, weights)
        })
        .collect()
}

/// Mafia rules with the default manual weights.
pub fn extract_mafia_events(record: &GameRecord) -> Result<Vec<ConstraintSet>, IngestError> {
    extract_mafia_events_with(record, &ManualWeights::default())
}

/// One set per game-day. The night-kill victim is a bystander. A YES lynch
/// vote suspects the target (`hypo_role_in(voter, target, mafia)`), a NO vote
/// supports it (`bystander`), both at the mid weight. Revealed roles become
/// evidence.
pub fn extract_mafia_events_with(
    record: &GameRecord,
    weights: &ManualWeights,
) -> Result<Vec<ConstraintSet>, IngestError> {
    if record.config.kind() != GameKind::Mafia {
        return Err(IngestError::BadRecord("Mafia extraction on a non-Mafia record".into()));
    }
    record.validate()?;
    record
        .rounds
        .iter()
        .map(|round| {
            let mut out = Vec::new();
            if let Some(victim) = &round.night_kill {
                out.push(Constraint::role_is(victim, "bystander"));
            }
            for v in &round.votes {
                let VoteTarget::Player(target) = &v.target else {
                    return Err(IngestError::BadRecord(format!(
                        "round {}: Mafia votes target a single player",
                        round.index
                    )));
                };
                let set = match v.vote {
                    Ballot::Yes => "mafia",
                    Ballot::No => "bystander",
                };
                out.push(
                    Constraint::new(ConstraintKind::HypoRoleIn {
                        speaker: v.voter.clone(),
                        target: target.clone(),
                        set: SetLabel::parse(set),
                    })
                    .with_weight(weights.mid),
                );
            }
            push_reveals(round, &mut out);
            finish_round(record, round, out, weights)
        })
        .collect()
}

fn push_reveals(round: &RoundEvents, out: &mut Vec<Constraint>) {
    for r in &round.reveals {
        out.push(Constraint::role_is(&r.player, &r.role));
    }
}

/// Stamps the round index, validates, and appends any embedded claims document.
fn finish_round(
    record: &GameRecord,
    round: &RoundEvents,
    events: Vec<Constraint>,
    weights: &ManualWeights,
) -> Result<ConstraintSet, IngestError> {
    let mut set = ConstraintSet::new();
    for c in events {
        c.validate(&record.config).map_err(|e| IngestError::BadRecord(format!("round {}: {e}", round.index)))?;
        set.push(c.at_round(round.index));
    }
    if let Some(doc) = &round.constraints {
        let claims = parse_document_value(doc, &record.config, weights)
            .map_err(|e| IngestError::Grammar { context: format!("round {}", round.index), source: e })?;
        set.extend(claims.iter().cloned().map(|c| c.at_round(round.index)));
    }
    Ok(set)
}

/// Dispatches on the record's game kind; custom games use only revealed
/// roles and embedded claims.
pub fn extract_events(record: &GameRecord) -> Result<Vec<ConstraintSet>, IngestError> {
    match record.config.kind() {
        GameKind::Avalon => extract_avalon_events(record),
        GameKind::Mafia => extract_mafia_events(record),
        GameKind::Custom => {
            record.validate()?;
            let weights = ManualWeights::default();
            record
                .rounds
                .iter()
                .map(|round| {
                    let mut out = Vec::new();
                    push_reveals(round, &mut out);
                    finish_round(record, round, out, &weights)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingestion::record::{Assassination, Proposal, QuestResult, Vote};
    use crate::model::{ConstraintClass, GameConfig};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn avalon(rounds: Vec<RoundEvents>) -> GameRecord {
        GameRecord { id: "a".into(), config: GameConfig::avalon_six(), rounds, truth: None, condition: None }
    }

    #[test]
    fn failed_quest_is_a_phenomenon() {
        let mut r = RoundEvents::new(1);
        r.quest_result = Some(QuestResult { team: names(&["player-1", "player-2", "player-3"]), fail_count: 2 });
        let sets = extract_avalon_events(&avalon(vec![r])).unwrap();
        assert_eq!(
            sets[0].phenomenon(),
            [Constraint::evil_at_least(&names(&["player-1", "player-2", "player-3"]), 2).at_round(1)]
        );
    }

    #[test]
    fn successful_quest_emits_nothing() {
        let mut r = RoundEvents::new(1);
        r.quest_result = Some(QuestResult { team: names(&["player-1", "player-2"]), fail_count: 0 });
        let sets = extract_avalon_events(&avalon(vec![r])).unwrap();
        assert!(sets[0].is_empty());
    }

    #[test]
    fn proposals_and_votes_become_weighted_hypotheses() {
        let mut r = RoundEvents::new(2);
        let team = names(&["player-1", "player-2"]);
        r.proposals.push(Proposal { proposer: "player-1".into(), team: team.clone() });
        r.votes.push(Vote { voter: "player-4".into(), target: VoteTarget::Team(team.clone()), vote: Ballot::Yes });
        r.votes.push(Vote { voter: "player-5".into(), target: VoteTarget::Team(team.clone()), vote: Ballot::No });
        let rec = avalon(vec![RoundEvents::new(1), r]);
        let sets = extract_avalon_events(&rec).unwrap();
        let h = sets[1].hypotheses();
        assert_eq!(h.len(), 3);
        assert_eq!(h[0].weight(), Some(0.5));
        assert_eq!(
            h[1],
            Constraint::new(ConstraintKind::HypoTeamGood { speaker: "player-4".into(), team: team.clone() })
                .with_weight(0.1)
                .at_round(2)
        );
        assert_eq!(h[2].kind().type_name(), "hypo_team_evil");
        assert_eq!(h[2].weight(), Some(0.1));
        assert!(h.iter().all(|c| c.round() == 2));
    }

    #[test]
    fn assassination_hit_and_miss() {
        let mut r = RoundEvents::new(1);
        r.assassination = Some(Assassination { killer: "player-6".into(), target: "player-1".into(), hit: true });
        let sets = extract_avalon_events(&avalon(vec![r.clone()])).unwrap();
        assert_eq!(sets[0].evidence()[1], Constraint::role_is("player-1", "merlin").at_round(1));
        r.assassination.as_mut().unwrap().hit = false;
        let sets = extract_avalon_events(&avalon(vec![r])).unwrap();
        assert_eq!(sets[0].evidence()[0], Constraint::role_is("player-6", "assassin").at_round(1));
        assert_eq!(sets[0].evidence()[1], Constraint::role_not("player-1", "merlin").at_round(1));
    }

    #[test]
    fn unknown_player_is_a_bad_record() {
        let mut r = RoundEvents::new(1);
        r.proposals.push(Proposal { proposer: "nobody".into(), team: names(&["player-1"]) });
        assert_eq!(extract_avalon_events(&avalon(vec![r])).unwrap_err().code(), "BAD_RECORD");
    }

    fn mafia(rounds: Vec<RoundEvents>) -> GameRecord {
        let cfg = GameConfig::new(
            GameKind::Mafia,
            ["Alice", "Bob", "Eve", "Victim", "Zed"],
            vec![
                crate::model::RoleSpec::new("mafia", 1, crate::model::Alignment::Evil),
                crate::model::RoleSpec::new("bystander", 4, crate::model::Alignment::Good),
            ],
        )
        .unwrap();
        GameRecord { id: "m".into(), config: cfg, rounds, truth: None, condition: None }
    }

    #[test]
    fn night_kill_victim_is_a_bystander() {
        let mut r = RoundEvents::new(1);
        r.night_kill = Some("Victim".into());
        let sets = extract_mafia_events(&mafia(vec![r])).unwrap();
        assert_eq!(sets[0].evidence(), [Constraint::role_is("Victim", "bystander").at_round(1)]);
    }

    #[test]
    fn lynch_votes() {
        let mut r = RoundEvents::new(1);
        r.votes.push(Vote { voter: "Bob".into(), target: VoteTarget::Player("Eve".into()), vote: Ballot::Yes });
        r.votes.push(Vote { voter: "Alice".into(), target: VoteTarget::Player("Eve".into()), vote: Ballot::No });
        let sets = extract_mafia_events(&mafia(vec![r])).unwrap();
        let h = sets[0].hypotheses();
        assert_eq!(
            h[0],
            Constraint::new(ConstraintKind::HypoRoleIn {
                speaker: "Bob".into(),
                target: "Eve".into(),
                set: SetLabel::Role("mafia".into())
            })
            .with_weight(0.2)
            .at_round(1)
        );
        assert_eq!(h[1].weight(), Some(0.2));
    }

    #[test]
    fn empty_round_is_empty() {
        let sets = extract_mafia_events(&mafia(vec![RoundEvents::new(1)])).unwrap();
        assert!(sets[0].is_empty());
    }

    #[test]
    fn embedded_claims_are_appended() {
        let mut r = RoundEvents::new(3);
        r.constraints = Some(serde_json::json!({
            "evidence": [], "phenomenon": [],
            "assertions": [{"type": "assert_role_is", "args": {"speaker": "player-2", "role": "percival"}}],
            "hypotheses": []
        }));
        let sets = extract_avalon_events(&avalon(vec![r])).unwrap();
        assert_eq!(sets[0].list(ConstraintClass::Assertion).len(), 1);
        assert_eq!(sets[0].assertions()[0].round(), 3);
    }

    #[test]
    fn extraction_is_deterministic() {
        let mut r = RoundEvents::new(1);
        r.proposals.push(Proposal { proposer: "player-2".into(), team: names(&["player-2", "player-3"]) });
        r.quest_result = Some(QuestResult { team: names(&["player-2", "player-3"]), fail_count: 1 });
        let rec = avalon(vec![r]);
        assert_eq!(extract_avalon_events(&rec).unwrap(), extract_avalon_events(&rec).unwrap());
    }

    #[test]
    fn wrong_kind_is_rejected() {
        assert!(extract_mafia_events(&avalon(vec![RoundEvents::new(1)])).is_err());
    }
}
