//! HTTP sessions over the hidden-role solver.
//!
//! A session holds a config, solver settings, an optional seat view and the
//! constraint batches added so far. Every mutation bumps the revision; reads
//! re-solve from scratch so equal revisions give equal bytes.

mod error;
mod session;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use rolecsp::grammar::constraint_to_value;
use rolecsp::solver::{IgReport, Posterior};
use rolecsp::{ConstraintSet, GameConfig, Preset, SolverSettings};
use serde_json::{json, Value};

pub use error::ApiError;
pub use session::{Batch, Session, ViewSpec};

const DEFAULT_TOP_K: usize = 5;

type Shared = Arc<RwLock<Session>>;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Shared>>>,
    snapshot_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Persists every session to `dir` after each mutation and restores the
    /// sessions already saved there.
    pub fn with_snapshots(dir: PathBuf) -> std::io::Result<Self> {
        std::fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|x| x == "json") {
                let s = Session::load(&path).map_err(|e| {
                    std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display()))
                })?;
                sessions.insert(s.id.clone(), Arc::new(RwLock::new(s)));
            }
        }
        Ok(AppState { sessions: Arc::new(RwLock::new(sessions)), snapshot_dir: Some(dir) })
    }

    fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions.read().expect("session map lock").get(id).cloned().ok_or_else(|| ApiError::not_found(id))
    }

    fn persist(&self, s: &Session) -> Result<(), ApiError> {
        if let Some(dir) = &self.snapshot_dir {
            s.save(dir).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IO_ERROR", e.to_string()))?;
        }
        Ok(())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/rounds/{k}/constraints", post(add_constraints))
        .route("/sessions/{id}/posterior", get(get_posterior))
        .route("/sessions/{id}/whatif", post(what_if))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/settings", put(put_settings))
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

type ApiResult = Result<Json<Value>, ApiError>;

fn json_body(body: &Bytes) -> Result<Value, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("MALFORMED", format!("invalid JSON: {e}")))
}

async fn blocking<F>(f: F) -> ApiResult
where
    F: FnOnce() -> ApiResult + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string())))
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let mut body = json_body(&body)?;
    let config = session::parse_config(body.get_mut("config").map(Value::take).unwrap_or(Value::Null))?;
    let settings = match body.get_mut("settings").map(Value::take) {
        None | Some(Value::Null) => SolverSettings::default(),
        Some(v) => session::parse_settings(v)?,
    };
    let view: Option<ViewSpec> = match body.get_mut("view").map(Value::take) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if s.eq_ignore_ascii_case("objective") => None,
        Some(v) => {
            Some(serde_json::from_value(v).map_err(|e| ApiError::bad_request("BAD_ARGS", format!("view: {e}")))?)
        }
    };
    blocking(move || {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let s = Session::new(id.clone(), config, settings, view)?;
        state.persist(&s)?;
        let revision = s.revision;
        state.sessions.write().expect("session map lock").insert(id.clone(), Arc::new(RwLock::new(s)));
        Ok(Json(json!({"id": id, "revision": revision})))
    })
    .await
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let s = state.get(&id)?;
    let s = s.read().expect("session lock");
    Ok(Json(s.summary()))
}

async fn add_constraints(
    State(state): State<AppState>,
    Path((id, k)): Path<(String, usize)>,
    body: Bytes,
) -> ApiResult {
    let doc = json_body(&body)?;
    let shared = state.get(&id)?;
    blocking(move || {
        let mut s = shared.write().expect("session lock");
        let set = s.parse_document(&doc)?.with_round(k);
        let added = set.len();
        s.batches.push(Batch { round: k, constraints: set });
        s.revision += 1;
        let all = s.constraints(None);
        let strict = SolverSettings { preset: Preset::Strict, ..s.settings.clone() };
        let check: Result<Posterior<f64>, _> = s.space.posterior(&all, &strict);
        let (infeasible, detail) = match check {
            Err(e) if e.infeasible_detail().is_some() => (true, ApiError::from(e).detail),
            _ => (false, Value::Null),
        };
        state.persist(&s)?;
        Ok(Json(json!({
            "revision": s.revision,
            "round": k,
            "added": added,
            "infeasible": infeasible,
            "detail": detail,
        })))
    })
    .await
}

struct PosteriorQuery {
    upto: Option<usize>,
    topk: Option<usize>,
}

impl PosteriorQuery {
    fn parse(raw: &HashMap<String, String>) -> Result<Self, ApiError> {
        let num = |key: &str| -> Result<Option<usize>, ApiError> {
            raw.get(key)
                .map(|v| {
                    v.parse().map_err(|_| {
                        ApiError::bad_request("BAD_ARGS", format!("`{key}` must be a nonnegative integer"))
                    })
                })
                .transpose()
        };
        Ok(PosteriorQuery { upto: num("upto")?, topk: num("topk")? })
    }
}

fn posterior_json(config: &GameConfig, p: &Posterior<f64>, top_k: usize) -> Value {
    let names = |w: &rolecsp::World| -> Vec<String> { w.role_names(config).into_iter().map(String::from).collect() };
    let top: Vec<Value> = p
        .top_k(top_k)
        .into_iter()
        .map(|w| json!({"roles": names(&w.world), "probability": w.probability, "log_score": w.log_score}))
        .collect();
    let hypotheses: Vec<Value> = p
        .hypothesis_weights
        .iter()
        .map(|h| {
            json!({
                "constraint": constraint_to_value(&h.hypothesis),
                "applied_weight": h.applied_weight,
                "ig_bits": h.ig.as_ref().map(|r| r.ig_bits),
                "vacuous": h.ig.as_ref().map(|r| r.vacuous),
            })
        })
        .collect();
    json!({
        "players": config.players(),
        "roles": config.roles().iter().map(|r| r.name.as_str()).collect::<Vec<_>>(),
        "marginals": p.marginals,
        "map": names(p.map_world()),
        "entropy_bits": p.entropy_bits,
        "feasible_count": p.feasible_count,
        "active_assertions": p.active_assertions,
        "hypotheses": hypotheses,
        "top_k": top,
    })
}

fn ig_json(r: &IgReport<f64>) -> Value {
    json!({
        "hypothesis": constraint_to_value(&r.hypothesis),
        "prior_entropy_bits": r.prior_entropy_bits,
        "posterior_entropy_bits": r.posterior_entropy_bits,
        "ig_bits": r.ig_bits,
        "applied_weight": r.applied_weight,
        "vacuous": r.vacuous,
    })
}

async fn get_posterior(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(raw): Query<HashMap<String, String>>,
) -> ApiResult {
    let q = PosteriorQuery::parse(&raw)?;
    let shared = state.get(&id)?;
    blocking(move || {
        let (space, set, settings, revision, current) = {
            let s = shared.read().expect("session lock");
            let set: ConstraintSet = s.constraints(q.upto);
            let current = q.upto.unwrap_or_else(|| s.latest_round());
            (s.space.clone(), set, s.settings.clone(), s.revision, current)
        };
        let p: Posterior<f64> = space.posterior_at(&set, &settings, current)?;
        let mut body = posterior_json(space.config(), &p, q.topk.unwrap_or(DEFAULT_TOP_K));
        body["revision"] = json!(revision);
        body["upto"] = json!(q.upto);
        Ok(Json(body))
    })
    .await
}

async fn what_if(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let body = json_body(&body)?;
    let shared = state.get(&id)?;
    blocking(move || {
        let (space, set, settings, revision, h) = {
            let s = shared.read().expect("session lock");
            let h = s.parse_candidate(&body)?;
            (s.space.clone(), s.constraints(None), s.settings.clone(), s.revision, h)
        };
        let (report, p) = space.what_if::<f64>(&set, &settings, &h)?;
        let mut out = posterior_json(space.config(), &p, DEFAULT_TOP_K);
        out["ig"] = ig_json(&report);
        out["revision"] = json!(revision);
        Ok(Json(out))
    })
    .await
}

async fn undo(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let shared = state.get(&id)?;
    blocking(move || {
        let mut s = shared.write().expect("session lock");
        let Some(batch) = s.batches.pop() else {
            return Err(ApiError::new(StatusCode::CONFLICT, "NOTHING_TO_UNDO", "no constraints to remove"));
        };
        s.revision += 1;
        state.persist(&s)?;
        Ok(Json(json!({"revision": s.revision, "removed": batch.constraints.len(), "round": batch.round})))
    })
    .await
}

async fn put_settings(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let settings = session::parse_settings(json_body(&body)?)?;
    let shared = state.get(&id)?;
    blocking(move || {
        let mut s = shared.write().expect("session lock");
        s.settings = settings;
        s.revision += 1;
        state.persist(&s)?;
        Ok(Json(json!({"revision": s.revision, "settings": s.settings})))
    })
    .await
}
