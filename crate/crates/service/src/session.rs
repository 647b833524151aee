use std::fs;
use std::path::Path;
use std::sync::Arc;

use rolecsp::grammar::{constraint_set_to_value, constraint_to_value, parse_constraint_value, parse_document_value};
use rolecsp::ingestion::RoundEvents;
use rolecsp::model::{validate_config, RawGameConfig};
use rolecsp::{ConstraintClass, ConstraintSet, GameConfig, ManualWeights, SolverSettings, View, WorldSpace};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ApiError;

/// The seat a session reasons from. `None` in a session means objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewSpec {
    pub role: String,
    pub viewer: String,
    /// Evidence entries the seat holds before play.
    #[serde(default)]
    pub knowledge: Vec<Value>,
}

impl ViewSpec {
    fn build(&self, config: &GameConfig) -> Result<View, ApiError> {
        let knowledge = self
            .knowledge
            .iter()
            .map(|v| parse_constraint_value(v, &ManualWeights::default()))
            .collect::<Result<Vec<_>, _>>()?;
        View::role(config, &self.viewer, &self.role, knowledge)
            .map_err(|e| ApiError::bad_request(e.code(), e.to_string()))
    }
}

/// One accepted request to add constraints; undo removes whole batches.
#[derive(Clone, Debug)]
pub struct Batch {
    pub round: usize,
    pub constraints: ConstraintSet,
}

pub struct Session {
    pub id: String,
    pub config: GameConfig,
    pub settings: SolverSettings,
    pub view_spec: Option<ViewSpec>,
    pub view: View,
    pub batches: Vec<Batch>,
    pub revision: u64,
    pub space: Arc<WorldSpace>,
}

pub fn parse_config(value: Value) -> Result<GameConfig, ApiError> {
    let raw: RawGameConfig =
        serde_json::from_value(value).map_err(|e| ApiError::bad_request("CONFIG_INVALID", e.to_string()))?;
    if let Err(errors) = validate_config(&raw) {
        let codes: Vec<&str> = errors.iter().map(|e| e.code()).collect();
        let message = errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ");
        return Err(ApiError::bad_request(codes[0], message).with_detail(serde_json::json!({"codes": codes})));
    }
    GameConfig::new(raw.kind, raw.players, raw.roles).map_err(|e| ApiError::bad_request(e.code(), e.to_string()))
}

pub fn parse_settings(value: Value) -> Result<SolverSettings, ApiError> {
    let s: SolverSettings =
        serde_json::from_value(value).map_err(|e| ApiError::bad_request("BAD_SETTINGS", e.to_string()))?;
    s.validate().map_err(|e| ApiError::bad_request("BAD_SETTINGS", e.to_string()))?;
    Ok(s)
}

impl Session {
    pub fn new(
        id: String,
        config: GameConfig,
        settings: SolverSettings,
        view_spec: Option<ViewSpec>,
    ) -> Result<Self, ApiError> {
        let view = match &view_spec {
            Some(v) => v.build(&config)?,
            None => View::objective(),
        };
        let space = WorldSpace::new(config.clone()).map_err(ApiError::from)?;
        Ok(Session { id, config, settings, view_spec, view, batches: Vec::new(), revision: 0, space: Arc::new(space) })
    }

    /// View knowledge plus every batch observed at or before `upto`.
    pub fn constraints(&self, upto: Option<usize>) -> ConstraintSet {
        let mut set: ConstraintSet = self.view.knowledge().iter().cloned().collect();
        for b in &self.batches {
            if upto.is_none_or(|k| b.round <= k) {
                set.extend(b.constraints.iter().cloned());
            }
        }
        set
    }

    pub fn latest_round(&self) -> usize {
        self.batches.iter().map(|b| b.round).max().unwrap_or(0)
    }

    pub fn parse_document(&self, doc: &Value) -> Result<ConstraintSet, ApiError> {
        Ok(parse_document_value(doc, &self.config, &self.settings.manual_weights)?)
    }

    /// A single hypothesis, given bare or as a document holding only it.
    pub fn parse_candidate(&self, body: &Value) -> Result<rolecsp::Constraint, ApiError> {
        let h = if body.get("type").is_some() {
            let c = parse_constraint_value(body, &self.settings.manual_weights)?;
            c.validate(&self.config).map_err(|e| ApiError::bad_request(e.code(), e.to_string()))?;
            c
        } else {
            let set = self.parse_document(body)?;
            let mut all = set.iter();
            match (all.next(), all.next()) {
                (Some(c), None) => c.clone(),
                _ => return Err(ApiError::bad_request("BAD_ARGS", "expected exactly one hypothesis")),
            }
        };
        if h.class() != ConstraintClass::Hypothesis {
            return Err(ApiError::bad_request(
                "WRONG_CLASS",
                format!("`{}` is not a hypothesis", h.kind().type_name()),
            ));
        }
        Ok(h.at_round(self.latest_round()))
    }

    pub fn summary(&self) -> Value {
        let rounds: Vec<Value> = self
            .batches
            .iter()
            .map(|b| serde_json::json!({"round": b.round, "constraints": constraint_set_to_value(&b.constraints)}))
            .collect();
        let knowledge: Vec<Value> = self.view.knowledge().iter().map(constraint_to_value).collect();
        serde_json::json!({
            "id": self.id,
            "revision": self.revision,
            "config": self.config,
            "settings": self.settings,
            "view": {"label": self.view.label(), "knowledge": knowledge},
            "batches": rounds,
        })
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            id: self.id.clone(),
            config: self.config.clone(),
            rounds: self
                .batches
                .iter()
                .map(|b| RoundEvents {
                    constraints: Some(constraint_set_to_value(&b.constraints)),
                    ..RoundEvents::new(b.round)
                })
                .collect(),
            settings: self.settings.clone(),
            view: self.view_spec.clone(),
            revision: self.revision,
        }
    }

    pub fn save(&self, dir: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&self.snapshot()).expect("snapshots serialize");
        let tmp = dir.join(format!(".{}.json.tmp", self.id));
        fs::write(&tmp, text)?;
        fs::rename(tmp, dir.join(format!("{}.json", self.id)))
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let snap: Snapshot = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let mut s = Session::new(snap.id, snap.config, snap.settings, snap.view).map_err(|e| e.message)?;
        for r in snap.rounds {
            let doc = r.constraints.unwrap_or(Value::Null);
            let set = s.parse_document(&doc).map_err(|e| e.message)?.with_round(r.index);
            s.batches.push(Batch { round: r.index, constraints: set });
        }
        s.revision = snap.revision;
        Ok(s)
    }
}

/// On-disk session: the record layout with one round entry per batch.
#[derive(Serialize, Deserialize)]
struct Snapshot {
    id: String,
    config: GameConfig,
    rounds: Vec<RoundEvents>,
    settings: SolverSettings,
    #[serde(default)]
    view: Option<ViewSpec>,
    revision: u64,
}
