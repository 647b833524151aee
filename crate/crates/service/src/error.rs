use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use rolecsp::grammar::{constraint_to_value, GrammarError};
use rolecsp::SolverError;
use serde_json::{json, Value};

/// Error body: `{code, message, detail}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, code: code.into(), message: message.into(), detail: Value::Null }
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "UNKNOWN_SESSION", format!("no session `{id}`"))
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

impl From<GrammarError> for ApiError {
    fn from(e: GrammarError) -> Self {
        ApiError::bad_request(e.code(), e.to_string())
    }
}

impl From<SolverError> for ApiError {
    fn from(e: SolverError) -> Self {
        let status = match e.code() {
            "INFEASIBLE" | "INFEASIBLE_CONTEXT" => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        let detail = e
            .infeasible_detail()
            .map(|d| json!({"constraint": constraint_to_value(&d.constraint), "round": d.round}))
            .unwrap_or(Value::Null);
        ApiError::new(status, e.code(), e.to_string()).with_detail(detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"code": self.code, "message": self.message, "detail": self.detail});
        (self.status, Json(body)).into_response()
    }
}
