use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{GameConfig, World};

use super::IngestError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Condition {
    Truth,
    Lie,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Truth => "TRUTH",
            Condition::Lie => "LIE",
        }
    }
}

impl std::str::FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "TRUTH" | "T" => Ok(Condition::Truth),
            "LIE" | "L" => Ok(Condition::Lie),
            _ => Err(format!("unknown condition `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Ballot {
    Yes,
    No,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposal {
    pub proposer: String,
    pub team: Vec<String>,
}

/// A team (Avalon party vote) or a single player (Mafia lynch vote).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VoteTarget {
    Team(Vec<String>),
    Player(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub voter: String,
    pub target: VoteTarget,
    pub vote: Ballot,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestResult {
    pub team: Vec<String>,
    pub fail_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assassination {
    pub killer: String,
    pub target: String,
    pub hit: bool,
}

/// A player's true role made public, such as a Mafia day-elimination reveal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reveal {
    pub player: String,
    pub role: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatLine {
    pub speaker: String,
    pub text: String,
}

/// Everything observed in one quest or game-day.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundEvents {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub proposals: Vec<Proposal>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub votes: Vec<Vote>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quest_result: Option<QuestResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub night_kill: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assassination: Option<Assassination>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reveals: Vec<Reveal>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chat: Vec<ChatLine>,
    /// Pre-extracted claims for this round, as a constraint document.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Value>,
}

impl RoundEvents {
    pub fn new(index: usize) -> Self {
        RoundEvents { index, ..Default::default() }
    }
}

/// One game: its config, per-round events, and optionally the true roles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    #[serde(default)]
    pub id: String,
    pub config: GameConfig,
    pub rounds: Vec<RoundEvents>,
    /// Player to true role.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
}

impl GameRecord {
    pub fn truth_world(&self) -> Result<Option<World>, IngestError> {
        let Some(map) = &self.truth else { return Ok(None) };
        if map.len() != self.config.num_players() {
            return Err(IngestError::BadRecord(format!(
                "truth names {} players, config has {}",
                map.len(),
                self.config.num_players()
            )));
        }
        World::from_names(&self.config, map.iter().map(|(p, r)| (p.as_str(), r.as_str())))
            .map(Some)
            .map_err(|e| IngestError::BadRecord(format!("truth: {e}")))
    }

    /// The truth world, which replay requires.
    pub fn require_truth(&self) -> Result<World, IngestError> {
        self.truth_world()?.ok_or_else(|| IngestError::BadRecord("record has no truth".into()))
    }

    pub fn set_truth(&mut self, world: &World) {
        let names = world.role_names(&self.config);
        self.truth = Some(self.config.players().iter().cloned().zip(names.into_iter().map(String::from)).collect());
    }

    /// Structural checks: rounds nonempty with increasing indices from 1,
    /// fail counts within team size, at most one quest result or night kill
    /// per round, and a valid truth when present.
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.rounds.is_empty() {
            return Err(IngestError::BadRecord("no rounds".into()));
        }
        let mut last = 0;
        for r in &self.rounds {
            if r.index <= last {
                return Err(IngestError::BadRecord(format!("round index {} out of order", r.index)));
            }
            last = r.index;
            if let Some(q) = &r.quest_result {
                if q.fail_count > q.team.len() {
                    return Err(IngestError::BadRecord(format!(
                        "round {}: {} fails on a team of {}",
                        r.index,
                        q.fail_count,
                        q.team.len()
                    )));
                }
                if r.night_kill.is_some() {
                    return Err(IngestError::BadRecord(format!(
                        "round {}: both a quest result and a night kill",
                        r.index
                    )));
                }
            }
        }
        self.truth_world()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        let record: GameRecord = serde_json::from_str(text).map_err(|e| IngestError::BadRecord(e.to_string()))?;
        record.validate()?;
        Ok(record)
    }
}

pub fn load_record(path: &Path) -> Result<GameRecord, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    GameRecord::from_json(&text).map_err(|e| e.in_file(path))
}

/// Every `*.json` record in `dir`, sorted by file name.
pub fn load_records(dir: &Path) -> Result<Vec<(PathBuf, GameRecord)>, IngestError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| IngestError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.into_iter().map(|p| load_record(&p).map(|r| (p, r))).collect()
}
