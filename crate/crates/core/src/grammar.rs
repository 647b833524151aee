//! Parser, serializer and semantic validator for constraint documents.
//!
//! A document is one JSON object with exactly the four arrays `evidence`,
//! `phenomenon`, `assertions` and `hypotheses`. Each entry is
//! `{"type": .., "args": {..}, "weight"?: number, "auto_weight"?: bool}`.
//! Unknown keys inside an entry are ignored; unknown top-level keys are not.

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::model::{
    Constraint, ConstraintClass, ConstraintError, ConstraintKind, ConstraintSet, GameConfig, ManualWeights, SetLabel,
};

const ARRAYS: [(&str, ConstraintClass); 4] = [
    ("evidence", ConstraintClass::Evidence),
    ("phenomenon", ConstraintClass::Phenomenon),
    ("assertions", ConstraintClass::Assertion),
    ("hypotheses", ConstraintClass::Hypothesis),
];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("{path}: unknown constraint type `{kind}`")]
    UnknownKind { path: String, kind: String },
    #[error("{path}: unknown name `{name}`")]
    UnknownName { path: String, name: String },
    #[error("{path}: {message}")]
    BadArgs { path: String, message: String },
}

impl GrammarError {
    pub fn code(&self) -> &'static str {
        match self {
            GrammarError::Malformed(_) => "MALFORMED",
            GrammarError::UnknownKind { .. } => "UNKNOWN_KIND",
            GrammarError::UnknownName { .. } => "UNKNOWN_NAME",
            GrammarError::BadArgs { .. } => "BAD_ARGS",
        }
    }

    fn bad(path: &str, message: impl Into<String>) -> Self {
        GrammarError::BadArgs { path: path.to_string(), message: message.into() }
    }

    fn from_constraint(path: &str, e: ConstraintError) -> Self {
        match e {
            ConstraintError::UnknownPlayer(name) | ConstraintError::UnknownRole(name) => {
                GrammarError::UnknownName { path: path.to_string(), name }
            }
            ConstraintError::BadArgs(m) => GrammarError::bad(path, m),
        }
    }
}

/// Parses a document with the default manual weights.
pub fn parse_constraint_document(text: impl AsRef<[u8]>, config: &GameConfig) -> Result<ConstraintSet, GrammarError> {
    parse_constraint_document_with(text, config, &ManualWeights::default())
}

/// Parses a document; hypotheses with neither `weight` nor `auto_weight`
/// receive the manual weight for their kind from `defaults`.
pub fn parse_constraint_document_with(
    text: impl AsRef<[u8]>,
    config: &GameConfig,
    defaults: &ManualWeights,
) -> Result<ConstraintSet, GrammarError> {
    let value: Value =
        serde_json::from_slice(text.as_ref()).map_err(|e| GrammarError::Malformed(format!("invalid JSON: {e}")))?;
    parse_document_value(&value, config, defaults)
}

/// Same as [`parse_constraint_document_with`] for an already-decoded value.
pub fn parse_document_value(
    value: &Value,
    config: &GameConfig,
    defaults: &ManualWeights,
) -> Result<ConstraintSet, GrammarError> {
    let obj = value.as_object().ok_or_else(|| GrammarError::Malformed("top level must be one object".into()))?;
    if let Some(extra) = obj.keys().find(|k| !ARRAYS.iter().any(|(name, _)| name == k)) {
        return Err(GrammarError::Malformed(format!("unknown top-level key `{extra}`")));
    }
    let mut set = ConstraintSet::new();
    for (key, class) in ARRAYS {
        let entries = obj
            .get(key)
            .ok_or_else(|| GrammarError::Malformed(format!("missing key `{key}`")))?
            .as_array()
            .ok_or_else(|| GrammarError::Malformed(format!("`{key}` must be an array")))?;
        for (i, entry) in entries.iter().enumerate() {
            let path = format!("{key}[{i}]");
            let c = parse_entry(entry, &path, defaults)?;
            if c.class() != class {
                return Err(GrammarError::Malformed(format!(
                    "{path}: `{}` belongs in `{}`",
                    c.kind().type_name(),
                    c.class().array_key()
                )));
            }
            c.validate(config).map_err(|e| GrammarError::from_constraint(&path, e))?;
            set.push(c);
        }
    }
    Ok(set)
}

/// Parses one constraint object without checking names against a config.
pub fn parse_constraint_value(value: &Value, defaults: &ManualWeights) -> Result<Constraint, GrammarError> {
    parse_entry(value, "constraint", defaults)
}

fn parse_entry(entry: &Value, path: &str, defaults: &ManualWeights) -> Result<Constraint, GrammarError> {
    let obj = entry.as_object().ok_or_else(|| GrammarError::Malformed(format!("{path}: entry must be an object")))?;
    let ty = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| GrammarError::Malformed(format!("{path}: missing string `type`")))?;
    let args = match obj.get("args") {
        Some(Value::Object(m)) => m,
        Some(_) => return Err(GrammarError::bad(path, "`args` must be an object")),
        None => return Err(GrammarError::bad(path, "missing `args`")),
    };
    let a = Args { map: args, path };
    let kind = match ty {
        "role_is" => ConstraintKind::RoleIs { player: a.string("player")?, role: a.string("role")? },
        "role_not" => ConstraintKind::RoleNot { player: a.string("player")?, role: a.string("role")? },
        "role_in" => ConstraintKind::RoleIn { player: a.string("player")?, roles: a.list("roles")? },
        "evil_at_least" => ConstraintKind::EvilAtLeast { team: a.list("team")?, min: a.count("min")? },
        "assert_role_is" => ConstraintKind::AssertRoleIs { speaker: a.speaker()?, role: a.string("role")? },
        "assert_team_good" => ConstraintKind::AssertTeamGood { speaker: a.speaker()?, team: a.list("team")? },
        "assert_role_in" => ConstraintKind::AssertRoleIn {
            speaker: a.speaker()?,
            target: a.string("target")?,
            set: SetLabel::parse(&a.string("set")?),
        },
        "hypo_role_in" => ConstraintKind::HypoRoleIn {
            speaker: a.speaker()?,
            target: a.string("target")?,
            set: SetLabel::parse(&a.string("set")?),
        },
        "hypo_team_good" => ConstraintKind::HypoTeamGood { speaker: a.speaker()?, team: a.list("team")? },
        "hypo_team_evil" => ConstraintKind::HypoTeamEvil { speaker: a.speaker()?, team: a.list("team")? },
        other => return Err(GrammarError::UnknownKind { path: path.to_string(), kind: other.to_string() }),
    };

    let weight = match obj.get("weight") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_f64().ok_or_else(|| GrammarError::bad(path, "`weight` must be a number"))?),
    };
    let auto_weight = match obj.get("auto_weight") {
        None | Some(Value::Null) => false,
        Some(v) => v.as_bool().ok_or_else(|| GrammarError::bad(path, "`auto_weight` must be a boolean"))?,
    };
    let is_hypothesis = kind.class() == ConstraintClass::Hypothesis;
    if !is_hypothesis && (weight.is_some() || auto_weight) {
        return Err(GrammarError::bad(path, "only hypotheses carry `weight` or `auto_weight`"));
    }
    if weight.is_some() && auto_weight {
        return Err(GrammarError::bad(path, "`weight` and `auto_weight` are mutually exclusive"));
    }
    if let Some(w) = weight {
        if !(w.is_finite() && w >= 0.0) {
            return Err(GrammarError::bad(path, format!("weight {w} must be >= 0")));
        }
    }
    let weight = match (is_hypothesis, weight, auto_weight) {
        (true, None, false) => Some(defaults.default_for(&kind)),
        (_, w, _) => w,
    };
    Ok(Constraint::from_parts(kind, weight, auto_weight, 0))
}

struct Args<'a> {
    map: &'a Map<String, Value>,
    path: &'a str,
}

impl Args<'_> {
    fn string(&self, key: &str) -> Result<String, GrammarError> {
        match self.map.get(key) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(GrammarError::bad(self.path, format!("`{key}` must be a string"))),
            None => Err(GrammarError::bad(self.path, format!("missing `{key}`"))),
        }
    }

    fn speaker(&self) -> Result<String, GrammarError> {
        for alias in ["proposer", "voter"] {
            if !self.map.contains_key("speaker") && self.map.contains_key(alias) {
                return self.string(alias);
            }
        }
        self.string("speaker")
    }

    fn list(&self, key: &str) -> Result<Vec<String>, GrammarError> {
        let arr = match self.map.get(key) {
            Some(Value::Array(a)) => a,
            Some(_) => return Err(GrammarError::bad(self.path, format!("`{key}` must be an array"))),
            None => return Err(GrammarError::bad(self.path, format!("missing `{key}`"))),
        };
        if arr.is_empty() {
            return Err(GrammarError::bad(self.path, format!("`{key}` is empty")));
        }
        arr.iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| GrammarError::bad(self.path, format!("`{key}` must hold strings")))
            })
            .collect()
    }

    fn count(&self, key: &str) -> Result<usize, GrammarError> {
        match self.map.get(key) {
            Some(v) => v
                .as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| GrammarError::bad(self.path, format!("`{key}` must be a nonnegative integer"))),
            None => Err(GrammarError::bad(self.path, format!("missing `{key}`"))),
        }
    }
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    evidence: Vec<EntryOut<'a>>,
    phenomenon: Vec<EntryOut<'a>>,
    assertions: Vec<EntryOut<'a>>,
    hypotheses: Vec<EntryOut<'a>>,
}

#[derive(Serialize)]
struct EntryOut<'a> {
    #[serde(rename = "type")]
    ty: &'static str,
    args: ArgsOut<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    auto_weight: bool,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ArgsOut<'a> {
    PlayerRole { player: &'a str, role: &'a str },
    PlayerRoles { player: &'a str, roles: &'a [String] },
    TeamMin { team: &'a [String], min: usize },
    SpeakerRole { speaker: &'a str, role: &'a str },
    SpeakerTeam { speaker: &'a str, team: &'a [String] },
    SpeakerTargetSet { speaker: &'a str, target: &'a str, set: &'a str },
}

fn entry_out(c: &Constraint) -> EntryOut<'_> {
    use ConstraintKind::*;
    let args = match c.kind() {
        RoleIs { player, role } | RoleNot { player, role } => ArgsOut::PlayerRole { player, role },
        RoleIn { player, roles } => ArgsOut::PlayerRoles { player, roles },
        EvilAtLeast { team, min } => ArgsOut::TeamMin { team, min: *min },
        AssertRoleIs { speaker, role } => ArgsOut::SpeakerRole { speaker, role },
        AssertTeamGood { speaker, team } | HypoTeamGood { speaker, team } | HypoTeamEvil { speaker, team } => {
            ArgsOut::SpeakerTeam { speaker, team }
        }
        AssertRoleIn { speaker, target, set } | HypoRoleIn { speaker, target, set } => {
            ArgsOut::SpeakerTargetSet { speaker, target, set: set.as_str() }
        }
    };
    EntryOut { ty: c.kind().type_name(), args, weight: c.weight(), auto_weight: c.auto_weight() }
}

/// Serializes a set as a compact document with fixed key order.
pub fn serialize_constraint_set(set: &ConstraintSet) -> Vec<u8> {
    serde_json::to_vec(&document_out(set)).expect("document serialization is infallible")
}

/// The document as a JSON value.
pub fn constraint_set_to_value(set: &ConstraintSet) -> Value {
    serde_json::to_value(document_out(set)).expect("document serialization is infallible")
}

/// One constraint as a document entry.
pub fn constraint_to_value(c: &Constraint) -> Value {
    serde_json::to_value(entry_out(c)).expect("entry serialization is infallible")
}

fn document_out(set: &ConstraintSet) -> DocumentOut<'_> {
    let list = |class| set.list(class).iter().map(entry_out).collect();
    DocumentOut {
        evidence: list(ConstraintClass::Evidence),
        phenomenon: list(ConstraintClass::Phenomenon),
        assertions: list(ConstraintClass::Assertion),
        hypotheses: list(ConstraintClass::Hypothesis),
    }
}
