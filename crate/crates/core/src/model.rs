//! Domain types shared by every other module.
//!
//! Everything here is validated on construction and immutable afterwards.
//! A [`GameConfig`] fixes the players and the role multiset; a [`World`] is
//! one total assignment consistent with that multiset; a [`Constraint`] is
//! one member of the constraint grammar, named by player and role strings so
//! that it can be serialized without a config at hand.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported table. Exact enumeration beyond this is out of reach.
pub const MAX_PLAYERS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Alignment {
    Good,
    Evil,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GameKind {
    Avalon,
    Mafia,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleSpec {
    pub name: String,
    pub count: usize,
    pub alignment: Alignment,
}

impl RoleSpec {
    pub fn new(name: impl Into<String>, count: usize, alignment: Alignment) -> Self {
        Self { name: name.into(), count, alignment }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("duplicate player `{0}`")]
    DuplicatePlayer(String),
    #[error("duplicate role `{0}`")]
    DuplicateRole(String),
    #[error("role counts sum to {roles} but there are {players} players")]
    CountMismatch { players: usize, roles: usize },
    #[error("role `{0}` has count zero")]
    ZeroCount(String),
    #[error("no EVIL role in an AVALON or MAFIA game")]
    NoEvilRole,
    #[error("no GOOD role")]
    NoGoodRole,
    #[error("empty player or role name")]
    EmptyName,
    #[error("role name `{0}` is reserved for alignment labels")]
    ReservedRoleName(String),
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::DuplicatePlayer(_) => "DUPLICATE_PLAYER",
            ConfigError::DuplicateRole(_) => "DUPLICATE_ROLE",
            ConfigError::CountMismatch { .. } => "COUNT_MISMATCH",
            ConfigError::ZeroCount(_) => "ZERO_COUNT",
            ConfigError::NoEvilRole => "NO_EVIL_ROLE",
            ConfigError::NoGoodRole => "NO_GOOD_ROLE",
            ConfigError::EmptyName => "EMPTY_NAME",
            ConfigError::ReservedRoleName(_) => "RESERVED_ROLE_NAME",
        }
    }
}

/// All invariant violations found in one config.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid game config: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl ConfigErrors {
    /// Code of the first violation, used for compact error payloads.
    pub fn code(&self) -> &'static str {
        self.0.first().map(ConfigError::code).unwrap_or("CONFIG_INVALID")
    }
}

/// Unvalidated config as it appears on disk and on the wire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGameConfig {
    pub kind: GameKind,
    pub players: Vec<String>,
    pub roles: Vec<RoleSpec>,
}

/// Returns every invariant violation of `raw`; `Ok` iff there are none.
pub fn validate_config(raw: &RawGameConfig) -> Result<(), Vec<ConfigError>> {
    let mut errors = Vec::new();

    let mut seen = HashSet::new();
    for p in &raw.players {
        if p.is_empty() {
            errors.push(ConfigError::EmptyName);
        } else if !seen.insert(p.as_str()) {
            errors.push(ConfigError::DuplicatePlayer(p.clone()));
        }
    }

    let mut seen = HashSet::new();
    for r in &raw.roles {
        if r.name.is_empty() {
            errors.push(ConfigError::EmptyName);
        } else if !seen.insert(r.name.as_str()) {
            errors.push(ConfigError::DuplicateRole(r.name.clone()));
        }
        if SetLabel::parse_alignment(&r.name).is_some() {
            errors.push(ConfigError::ReservedRoleName(r.name.clone()));
        }
        if r.count == 0 {
            errors.push(ConfigError::ZeroCount(r.name.clone()));
        }
    }

    let total: usize = raw.roles.iter().map(|r| r.count).sum();
    if total != raw.players.len() {
        errors.push(ConfigError::CountMismatch { players: raw.players.len(), roles: total });
    }

    let has = |a: Alignment| raw.roles.iter().any(|r| r.alignment == a && r.count > 0);
    if !has(Alignment::Good) {
        errors.push(ConfigError::NoGoodRole);
    }
    if matches!(raw.kind, GameKind::Avalon | GameKind::Mafia) && !has(Alignment::Evil) {
        errors.push(ConfigError::NoEvilRole);
    }

    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Players, the role catalogue with counts, and the good/evil partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGameConfig", into = "RawGameConfig")]
pub struct GameConfig {
    kind: GameKind,
    players: Vec<String>,
    roles: Vec<RoleSpec>,
}

impl TryFrom<RawGameConfig> for GameConfig {
    type Error = ConfigErrors;

    fn try_from(raw: RawGameConfig) -> Result<Self, Self::Error> {
        validate_config(&raw).map_err(ConfigErrors)?;
        Ok(GameConfig { kind: raw.kind, players: raw.players, roles: raw.roles })
    }
}

impl From<GameConfig> for RawGameConfig {
    fn from(c: GameConfig) -> Self {
        RawGameConfig { kind: c.kind, players: c.players, roles: c.roles }
    }
}

impl GameConfig {
    pub fn new(
        kind: GameKind,
        players: impl IntoIterator<Item = impl Into<String>>,
        roles: Vec<RoleSpec>,
    ) -> Result<Self, ConfigErrors> {
        let players = players.into_iter().map(Into::into).collect();
        GameConfig::try_from(RawGameConfig { kind, players, roles })
    }

    /// The six-seat Avalon table: Merlin, Percival, Morgana, Assassin and
    /// two Servants, with players named `player-1` .. `player-6`.
    pub fn avalon_six() -> Self {
        Self::avalon(6).expect("six seats are supported")
    }

    /// Standard Avalon boards for 5 to 10 seats.
    pub fn avalon(seats: usize) -> Option<Self> {
        use Alignment::*;
        let (servants, minions) = match seats {
            5 => (1, 0),
            6 => (2, 0),
            7 => (2, 1),
            8 => (3, 1),
            9 => (4, 1),
            10 => (4, 2),
            _ => return None,
        };
        let mut roles = vec![
            RoleSpec::new("merlin", 1, Good),
            RoleSpec::new("percival", 1, Good),
            RoleSpec::new("servant", servants, Good),
            RoleSpec::new("morgana", 1, Evil),
            RoleSpec::new("assassin", 1, Evil),
        ];
        if minions > 0 {
            roles.push(RoleSpec::new("minion", minions, Evil));
        }
        let players = (1..=seats).map(|i| format!("player-{i}"));
        Self::new(GameKind::Avalon, players, roles).ok()
    }

    /// A Mafia table with `mafia` mafiosi among `seats` players.
    pub fn mafia(seats: usize, mafia: usize) -> Result<Self, ConfigErrors> {
        let roles = vec![
            RoleSpec::new("mafia", mafia, Alignment::Evil),
            RoleSpec::new("bystander", seats.saturating_sub(mafia), Alignment::Good),
        ];
        Self::new(GameKind::Mafia, (1..=seats).map(|i| format!("player-{i}")), roles)
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn roles(&self) -> &[RoleSpec] {
        &self.roles
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_roles(&self) -> usize {
        self.roles.len()
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    pub fn role_index(&self, name: &str) -> Option<usize> {
        self.roles.iter().position(|r| r.name == name)
    }

    pub fn role_name(&self, role: usize) -> &str {
        &self.roles[role].name
    }

    pub fn alignment(&self, role: usize) -> Alignment {
        self.roles[role].alignment
    }

    pub fn role_alignment(&self, name: &str) -> Option<Alignment> {
        self.role_index(name).map(|r| self.alignment(r))
    }

    pub fn counts(&self) -> Vec<usize> {
        self.roles.iter().map(|r| r.count).collect()
    }

    /// Names of all roles with the given alignment, in config order.
    pub fn roles_aligned(&self, alignment: Alignment) -> Vec<String> {
        self.roles.iter().filter(|r| r.alignment == alignment).map(|r| r.name.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("expected {expected} assignments, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("player `{0}` is unassigned")]
    Unassigned(String),
    #[error("role `{role}` used {used} times, config allows {count}")]
    CountViolation { role: String, used: usize, count: usize },
}

/// One total assignment player -> role, stored as role indices in player order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    roles: Vec<u8>,
}

impl World {
    /// Builds a world from role indices in player order and checks the
    /// role multiset against `config`.
    pub fn from_indices(config: &GameConfig, roles: &[usize]) -> Result<Self, WorldError> {
        if roles.len() != config.num_players() {
            return Err(WorldError::WrongLength { expected: config.num_players(), got: roles.len() });
        }
        let mut used = vec![0usize; config.num_roles()];
        for &r in roles {
            if r >= config.num_roles() {
                return Err(WorldError::UnknownRole(r.to_string()));
            }
            used[r] += 1;
        }
        for (r, spec) in config.roles().iter().enumerate() {
            if used[r] != spec.count {
                return Err(WorldError::CountViolation { role: spec.name.clone(), used: used[r], count: spec.count });
            }
        }
        Ok(World { roles: roles.iter().map(|&r| r as u8).collect() })
    }

    /// Builds a world from `(player, role)` name pairs in any order.
    pub fn from_names<'a, I>(config: &GameConfig, pairs: I) -> Result<Self, WorldError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut slots: Vec<Option<usize>> = vec![None; config.num_players()];
        let mut given = 0;
        for (p, r) in pairs {
            let pi = config.player_index(p).ok_or_else(|| WorldError::UnknownPlayer(p.into()))?;
            let ri = config.role_index(r).ok_or_else(|| WorldError::UnknownRole(r.into()))?;
            slots[pi] = Some(ri);
            given += 1;
        }
        if given != config.num_players() {
            return Err(WorldError::WrongLength { expected: config.num_players(), got: given });
        }
        let roles = slots
            .iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| WorldError::Unassigned(config.players()[i].clone())))
            .collect::<Result<Vec<_>, _>>()?;
        World::from_indices(config, &roles)
    }

    /// Internal constructor for enumeration paths that already respect the multiset.
    pub(crate) fn from_raw(roles: Vec<u8>) -> Self {
        World { roles }
    }

    pub fn role(&self, player: usize) -> usize {
        self.roles[player] as usize
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn roles(&self) -> impl Iterator<Item = usize> + '_ {
        self.roles.iter().map(|&r| r as usize)
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.roles
    }

    pub(crate) fn swap(&mut self, a: usize, b: usize) {
        self.roles.swap(a, b);
    }

    /// Role names in player order.
    pub fn role_names<'c>(&self, config: &'c GameConfig) -> Vec<&'c str> {
        self.roles().map(|r| config.role_name(r)).collect()
    }

    pub fn is_evil(&self, config: &GameConfig, player: usize) -> bool {
        config.alignment(self.role(player)) == Alignment::Evil
    }
}

/// Target of a role-set predicate: an alignment or one named role (faction).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetLabel {
    Good,
    Evil,
    Role(String),
}

impl SetLabel {
    pub(crate) fn parse_alignment(s: &str) -> Option<SetLabel> {
        match s.to_ascii_lowercase().as_str() {
            "good" => Some(SetLabel::Good),
            "evil" => Some(SetLabel::Evil),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> SetLabel {
        SetLabel::parse_alignment(s).unwrap_or_else(|| SetLabel::Role(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        match self {
            SetLabel::Good => "good",
            SetLabel::Evil => "evil",
            SetLabel::Role(r) => r,
        }
    }
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ConstraintClass {
    Evidence,
    Phenomenon,
    Assertion,
    Hypothesis,
}

impl ConstraintClass {
    pub fn is_hard(self) -> bool {
        matches!(self, ConstraintClass::Evidence | ConstraintClass::Phenomenon)
    }

    /// Key of the document array holding this class.
    pub fn array_key(self) -> &'static str {
        match self {
            ConstraintClass::Evidence => "evidence",
            ConstraintClass::Phenomenon => "phenomenon",
            ConstraintClass::Assertion => "assertions",
            ConstraintClass::Hypothesis => "hypotheses",
        }
    }
}

/// The constraint grammar. The class of a constraint is fixed by its kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    RoleIs { player: String, role: String },
    RoleNot { player: String, role: String },
    RoleIn { player: String, roles: Vec<String> },
    EvilAtLeast { team: Vec<String>, min: usize },
    AssertRoleIs { speaker: String, role: String },
    AssertTeamGood { speaker: String, team: Vec<String> },
    AssertRoleIn { speaker: String, target: String, set: SetLabel },
    HypoRoleIn { speaker: String, target: String, set: SetLabel },
    HypoTeamGood { speaker: String, team: Vec<String> },
    HypoTeamEvil { speaker: String, team: Vec<String> },
}

impl ConstraintKind {
    pub fn type_name(&self) -> &'static str {
        match self {
            ConstraintKind::RoleIs { .. } => "role_is",
            ConstraintKind::RoleNot { .. } => "role_not",
            ConstraintKind::RoleIn { .. } => "role_in",
            ConstraintKind::EvilAtLeast { .. } => "evil_at_least",
            ConstraintKind::AssertRoleIs { .. } => "assert_role_is",
            ConstraintKind::AssertTeamGood { .. } => "assert_team_good",
            ConstraintKind::AssertRoleIn { .. } => "assert_role_in",
            ConstraintKind::HypoRoleIn { .. } => "hypo_role_in",
            ConstraintKind::HypoTeamGood { .. } => "hypo_team_good",
            ConstraintKind::HypoTeamEvil { .. } => "hypo_team_evil",
        }
    }

    pub fn class(&self) -> ConstraintClass {
        use ConstraintKind::*;
        match self {
            RoleIs { .. } | RoleNot { .. } | RoleIn { .. } => ConstraintClass::Evidence,
            EvilAtLeast { .. } => ConstraintClass::Phenomenon,
            AssertRoleIs { .. } | AssertTeamGood { .. } | AssertRoleIn { .. } => ConstraintClass::Assertion,
            HypoRoleIn { .. } | HypoTeamGood { .. } | HypoTeamEvil { .. } => ConstraintClass::Hypothesis,
        }
    }

    fn players(&self) -> Vec<&str> {
        use ConstraintKind::*;
        match self {
            RoleIs { player, .. } | RoleNot { player, .. } | RoleIn { player, .. } => {
                vec![player.as_str()]
            }
            EvilAtLeast { team, .. } => team.iter().map(String::as_str).collect(),
            AssertRoleIs { speaker, .. } => vec![speaker.as_str()],
            AssertTeamGood { speaker, team } | HypoTeamGood { speaker, team } | HypoTeamEvil { speaker, team } => {
                std::iter::once(speaker.as_str()).chain(team.iter().map(String::as_str)).collect()
            }
            AssertRoleIn { speaker, target, .. } | HypoRoleIn { speaker, target, .. } => {
                vec![speaker.as_str(), target.as_str()]
            }
        }
    }

    fn roles(&self) -> Vec<&str> {
        use ConstraintKind::*;
        match self {
            RoleIs { role, .. } | RoleNot { role, .. } | AssertRoleIs { role, .. } => {
                vec![role.as_str()]
            }
            RoleIn { roles, .. } => roles.iter().map(String::as_str).collect(),
            AssertRoleIn { set: SetLabel::Role(r), .. } | HypoRoleIn { set: SetLabel::Role(r), .. } => {
                vec![r.as_str()]
            }
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("{0}")]
    BadArgs(String),
}

impl ConstraintError {
    pub fn code(&self) -> &'static str {
        match self {
            ConstraintError::UnknownPlayer(_) | ConstraintError::UnknownRole(_) => "UNKNOWN_NAME",
            ConstraintError::BadArgs(_) => "BAD_ARGS",
        }
    }
}

/// One constraint with its weight policy and the round it was observed in.
///
/// `weight` and `auto_weight` only apply to hypotheses and are mutually
/// exclusive. Round 0 is reserved for perspective knowledge held before play.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    kind: ConstraintKind,
    weight: Option<f64>,
    auto_weight: bool,
    round: usize,
}

impl Constraint {
    pub fn new(kind: ConstraintKind) -> Self {
        Constraint { kind, weight: None, auto_weight: false, round: 0 }
    }

    pub fn role_is(player: &str, role: &str) -> Self {
        Self::new(ConstraintKind::RoleIs { player: player.into(), role: role.into() })
    }

    pub fn role_not(player: &str, role: &str) -> Self {
        Self::new(ConstraintKind::RoleNot { player: player.into(), role: role.into() })
    }

    pub fn role_in(player: &str, roles: &[String]) -> Self {
        Self::new(ConstraintKind::RoleIn { player: player.into(), roles: roles.to_vec() })
    }

    pub fn evil_at_least(team: &[String], min: usize) -> Self {
        Self::new(ConstraintKind::EvilAtLeast { team: team.to_vec(), min })
    }

    /// Sets a manual hypothesis weight. Panics on non-hypotheses or
    /// negative/non-finite weights; parsed input goes through [`Constraint::validate`].
    pub fn with_weight(mut self, weight: f64) -> Self {
        assert_eq!(self.class(), ConstraintClass::Hypothesis, "only hypotheses carry weights");
        assert!(weight.is_finite() && weight >= 0.0, "weight must be finite and nonnegative");
        self.weight = Some(weight);
        self.auto_weight = false;
        self
    }

    /// Requests an information-gain weight instead of a manual one.
    pub fn with_auto_weight(mut self) -> Self {
        assert_eq!(self.class(), ConstraintClass::Hypothesis, "only hypotheses carry weights");
        self.auto_weight = true;
        self.weight = None;
        self
    }

    pub fn at_round(mut self, round: usize) -> Self {
        self.round = round;
        self
    }

    pub(crate) fn from_parts(kind: ConstraintKind, weight: Option<f64>, auto_weight: bool, round: usize) -> Self {
        Constraint { kind, weight, auto_weight, round }
    }

    pub fn kind(&self) -> &ConstraintKind {
        &self.kind
    }

    pub fn class(&self) -> ConstraintClass {
        self.kind.class()
    }

    pub fn weight(&self) -> Option<f64> {
        self.weight
    }

    pub fn auto_weight(&self) -> bool {
        self.auto_weight
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn is_hard(&self) -> bool {
        self.class().is_hard()
    }

    /// Manual weight of a hypothesis: its own weight, or the default for its kind.
    pub fn manual_weight(&self, defaults: &ManualWeights) -> f64 {
        self.weight.unwrap_or_else(|| defaults.default_for(&self.kind))
    }

    /// Checks names against `config` plus the argument and weight rules.
    pub fn validate(&self, config: &GameConfig) -> Result<(), ConstraintError> {
        for p in self.kind.players() {
            if config.player_index(p).is_none() {
                return Err(ConstraintError::UnknownPlayer(p.to_string()));
            }
        }
        for r in self.kind.roles() {
            if config.role_index(r).is_none() {
                return Err(ConstraintError::UnknownRole(r.to_string()));
            }
        }
        use ConstraintKind::*;
        match &self.kind {
            RoleIn { roles, .. } if roles.is_empty() => {
                return Err(ConstraintError::BadArgs("role_in needs a nonempty role set".into()));
            }
            EvilAtLeast { team, min } => {
                if team.is_empty() {
                    return Err(ConstraintError::BadArgs("empty team".into()));
                }
                if *min < 1 || *min > team.len() {
                    return Err(ConstraintError::BadArgs(format!("min {min} outside 1..={}", team.len())));
                }
            }
            AssertTeamGood { team, .. } | HypoTeamGood { team, .. } | HypoTeamEvil { team, .. } if team.is_empty() => {
                return Err(ConstraintError::BadArgs("empty team".into()));
            }
            _ => {}
        }
        let is_hypothesis = self.class() == ConstraintClass::Hypothesis;
        if let Some(w) = self.weight {
            if !is_hypothesis {
                return Err(ConstraintError::BadArgs("weight on a non-hypothesis".into()));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(ConstraintError::BadArgs(format!("weight {w} must be >= 0")));
            }
        }
        if self.auto_weight {
            if !is_hypothesis {
                return Err(ConstraintError::BadArgs("auto_weight on a non-hypothesis".into()));
            }
            if self.weight.is_some() {
                return Err(ConstraintError::BadArgs("weight and auto_weight together".into()));
            }
        }
        Ok(())
    }
}

/// The accumulated constraint set, split by class.
///
/// Members can only enter through [`ConstraintSet::push`], which routes each
/// constraint to the list matching its class.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSet {
    evidence: Vec<Constraint>,
    phenomenon: Vec<Constraint>,
    assertions: Vec<Constraint>,
    hypotheses: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Constraint) {
        match c.class() {
            ConstraintClass::Evidence => self.evidence.push(c),
            ConstraintClass::Phenomenon => self.phenomenon.push(c),
            ConstraintClass::Assertion => self.assertions.push(c),
            ConstraintClass::Hypothesis => self.hypotheses.push(c),
        }
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = Constraint>) {
        for c in other {
            self.push(c);
        }
    }

    pub fn evidence(&self) -> &[Constraint] {
        &self.evidence
    }

    pub fn phenomenon(&self) -> &[Constraint] {
        &self.phenomenon
    }

    pub fn assertions(&self) -> &[Constraint] {
        &self.assertions
    }

    pub fn hypotheses(&self) -> &[Constraint] {
        &self.hypotheses
    }

    pub fn list(&self, class: ConstraintClass) -> &[Constraint] {
        match class {
            ConstraintClass::Evidence => &self.evidence,
            ConstraintClass::Phenomenon => &self.phenomenon,
            ConstraintClass::Assertion => &self.assertions,
            ConstraintClass::Hypothesis => &self.hypotheses,
        }
    }

    /// All members in class order: evidence, phenomenon, assertions, hypotheses.
    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.evidence.iter().chain(&self.phenomenon).chain(&self.assertions).chain(&self.hypotheses)
    }

    /// Hard members ordered by round, then evidence before phenomenon, then list order.
    pub fn hard_in_order(&self) -> Vec<&Constraint> {
        let mut hard: Vec<&Constraint> = self.evidence.iter().chain(&self.phenomenon).collect();
        hard.sort_by_key(|c| c.round);
        hard
    }

    pub fn len(&self) -> usize {
        self.evidence.len() + self.phenomenon.len() + self.assertions.len() + self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stamps every member with round `k`.
    pub fn with_round(mut self, k: usize) -> Self {
        for c in self.lists_mut() {
            c.round = k;
        }
        self
    }

    /// Members observed at or before round `k`.
    pub fn upto(&self, k: usize) -> ConstraintSet {
        let mut out = ConstraintSet::new();
        out.extend(self.iter().filter(|c| c.round <= k).cloned());
        out
    }

    /// Largest round index among members, 0 when empty.
    pub fn latest_round(&self) -> usize {
        self.iter().map(|c| c.round).max().unwrap_or(0)
    }

    pub fn validate(&self, config: &GameConfig) -> Result<(), ConstraintError> {
        self.iter().try_for_each(|c| c.validate(config))
    }

    fn lists_mut(&mut self) -> impl Iterator<Item = &mut Constraint> {
        self.evidence
            .iter_mut()
            .chain(self.phenomenon.iter_mut())
            .chain(self.assertions.iter_mut())
            .chain(self.hypotheses.iter_mut())
    }
}

impl FromIterator<Constraint> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = Constraint>>(iter: I) -> Self {
        let mut s = ConstraintSet::new();
        s.extend(iter);
        s
    }
}

/// Constraint-inclusion policy for the soft part of the score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "STRICT")]
    Strict,
    #[serde(rename = "ASSERT")]
    Assert,
    #[serde(rename = "HYP_IG")]
    HypIg,
    #[serde(rename = "HYP_M")]
    HypM,
    #[serde(rename = "TURN_IG")]
    TurnIg,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Strict, Preset::Assert, Preset::HypIg, Preset::HypM, Preset::TurnIg];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Strict => "STRICT",
            Preset::Assert => "ASSERT",
            Preset::HypIg => "HYP_IG",
            Preset::HypM => "HYP_M",
            Preset::TurnIg => "TURN_IG",
        }
    }

    pub fn uses_assertions(self) -> bool {
        self != Preset::Strict
    }

    pub fn uses_hypotheses(self) -> bool {
        matches!(self, Preset::HypIg | Preset::HypM | Preset::TurnIg)
    }

    pub fn uses_ig(self) -> bool {
        matches!(self, Preset::HypIg | Preset::TurnIg)
    }

    /// Whether only hypotheses from the latest round enter the score.
    pub fn current_round_only(self) -> bool {
        self == Preset::TurnIg
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown preset `{0}` (expected STRICT, ASSERT, HYP_IG, HYP_M or TURN_IG)")]
pub struct UnknownPreset(pub String);

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .trim_start_matches('+')
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .collect::<String>()
            .to_ascii_uppercase();
        match norm.as_str() {
            "STRICT" => Ok(Preset::Strict),
            "ASSERT" => Ok(Preset::Assert),
            "HYPIG" => Ok(Preset::HypIg),
            "HYPM" => Ok(Preset::HypM),
            "TURNIG" => Ok(Preset::TurnIg),
            _ => Err(UnknownPreset(s.to_string())),
        }
    }
}

/// Manual hypothesis weights by cue strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManualWeights {
    pub strong: f64,
    pub mid: f64,
    pub low: f64,
}

impl Default for ManualWeights {
    fn default() -> Self {
        ManualWeights { strong: 0.5, mid: 0.2, low: 0.1 }
    }
}

impl ManualWeights {
    /// Weight given to a hypothesis that arrives without one.
    pub fn default_for(&self, kind: &ConstraintKind) -> f64 {
        match kind {
            ConstraintKind::HypoTeamGood { .. } => self.strong,
            ConstraintKind::HypoTeamEvil { .. } => self.low,
            _ => self.mid,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("invalid solver settings: {0}")]
pub struct SettingsError(pub String);

/// Preset selector and weight table. Entropies are always in bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub preset: Preset,
    pub assertion_weight: f64,
    pub manual_weights: ManualWeights,
    pub ig_scale: f64,
    pub global_scale: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            preset: Preset::Strict,
            assertion_weight: 10_000.0,
            manual_weights: ManualWeights::default(),
            ig_scale: 1.0,
            global_scale: 1.0,
        }
    }
}

impl SolverSettings {
    pub fn with_preset(preset: Preset) -> Self {
        SolverSettings { preset, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SettingsError> {
        let m = &self.manual_weights;
        if !(self.assertion_weight.is_finite() && self.assertion_weight > 1.0) {
            return Err(SettingsError(format!("assertion weight {} must exceed 1", self.assertion_weight)));
        }
        if !(0.0 < m.low && m.low <= m.mid && m.mid <= m.strong && m.strong < 1.0) {
            return Err(SettingsError(format!(
                "manual weights must satisfy 0 < low <= mid <= strong < 1, got {}/{}/{}",
                m.strong, m.mid, m.low
            )));
        }
        if !(self.ig_scale.is_finite() && self.ig_scale >= 0.0) {
            return Err(SettingsError(format!("IG scale {} must be >= 0", self.ig_scale)));
        }
        if !(self.global_scale.is_finite() && self.global_scale > 0.0) {
            return Err(SettingsError(format!("global scale {} must be > 0", self.global_scale)));
        }
        // Keeps every score >= 1.
        if self.global_scale * self.assertion_weight <= 1.0 {
            return Err(SettingsError("scaled assertion weight must exceed 1".into()));
        }
        Ok(())
    }

    /// The multiplicative factor a satisfied assertion contributes.
    pub fn effective_assertion_weight(&self) -> f64 {
        self.global_scale * self.assertion_weight
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ViewKind {
    Objective,
    Role { viewer: String, role: String },
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViewKind::Objective => f.write_str("objective"),
            ViewKind::Role { viewer, role } => write!(f, "{role}:{viewer}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ViewError {
    #[error("viewer `{viewer}` does not hold role `{role}`")]
    ViewerRoleMismatch { viewer: String, role: String },
    #[error("view knowledge must be evidence, found `{0}`")]
    NotEvidence(&'static str),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

impl ViewError {
    pub fn code(&self) -> &'static str {
        match self {
            ViewError::ViewerRoleMismatch { .. } => "VIEWER_ROLE_MISMATCH",
            ViewError::NotEvidence(_) => "BAD_ARGS",
            ViewError::Constraint(e) => e.code(),
        }
    }
}

/// A perspective and the hard knowledge it contributes.
#[derive(Clone, Debug, PartialEq)]
pub struct View {
    kind: ViewKind,
    knowledge: Vec<Constraint>,
}

impl View {
    pub fn objective() -> Self {
        View { kind: ViewKind::Objective, knowledge: Vec::new() }
    }

    /// A seat's view. `role_is(viewer, role)` is added when `knowledge` lacks it.
    pub fn role(config: &GameConfig, viewer: &str, role: &str, knowledge: Vec<Constraint>) -> Result<Self, ViewError> {
        let own = Constraint::role_is(viewer, role);
        own.validate(config)?;
        let mut all = Vec::with_capacity(knowledge.len() + 1);
        if !knowledge.iter().any(|c| c.kind() == own.kind()) {
            all.push(own);
        }
        for c in knowledge {
            if c.class() != ConstraintClass::Evidence {
                return Err(ViewError::NotEvidence(c.kind().type_name()));
            }
            c.validate(config)?;
            all.push(c.at_round(0));
        }
        Ok(View { kind: ViewKind::Role { viewer: viewer.into(), role: role.into() }, knowledge: all })
    }

    pub fn kind(&self) -> &ViewKind {
        &self.kind
    }

    pub fn knowledge(&self) -> &[Constraint] {
        &self.knowledge
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }
}
