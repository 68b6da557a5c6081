//! HTTP session server. Plain request/response; the client polls `state` and
//! drives the step cadence through `advance`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::session::{CreateRequest, Session, SessionError, StateDocument, VerbalPreview};

/// Upper bound on one advance call.
pub const MAX_ADVANCE: usize = 10_000;

#[derive(Default, Clone)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Arc<Mutex<Session>>>>>,
}

impl AppState {
    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let sessions = self.sessions.read().unwrap_or_else(|e| e.into_inner());
        sessions.get(id).cloned().ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session `{id}`")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    invariant: Option<&'static str>,
}

impl ApiError {
    fn new(status: StatusCode, message: String) -> Self {
        Self { status, message, invariant: None }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::Map(sarhrl_core::env::WorldError::Io { .. }) | SessionError::Kb(sarhrl_core::context::KbError::Io { .. }) => {
                StatusCode::NOT_FOUND
            }
            SessionError::Map(_) | SessionError::Kb(_) | SessionError::Tables(_) | SessionError::KindMismatch { .. } => StatusCode::BAD_REQUEST,
            SessionError::NotFound(_) | SessionError::MissingTables => StatusCode::NOT_FOUND,
            SessionError::EmptyText => StatusCode::UNPROCESSABLE_ENTITY,
            SessionError::Done => StatusCode::CONFLICT,
            SessionError::Agent(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self { status, message: e.to_string(), invariant: e.invariant() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(inv) = self.invariant {
            body["invariant"] = inv.into();
        }
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Created {
    pub session_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerbalRequest {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvanceRequest {
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advanced {
    pub executed: usize,
    pub state: StateDocument,
}

/// Runs `f` on the session off the async workers, holding its lock.
async fn with_session<T: Send + 'static>(
    app: &AppState,
    id: &str,
    f: impl FnOnce(&mut Session) -> Result<T, SessionError> + Send + 'static,
) -> Result<T, ApiError> {
    let session = app.get(id)?;
    tokio::task::spawn_blocking(move || {
        let mut guard = session.lock().unwrap_or_else(|e| e.into_inner());
        f(&mut guard).map_err(ApiError::from)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

async fn create(State(app): State<AppState>, Json(req): Json<CreateRequest>) -> Result<Json<Created>, ApiError> {
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = {
        let id = id.clone();
        tokio::task::spawn_blocking(move || Session::create(id, &req))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??
    };
    app.sessions.write().unwrap_or_else(|e| e.into_inner()).insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok(Json(Created { session_id: id }))
}

async fn state(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<StateDocument>, ApiError> {
    with_session(&app, &id, |s| Ok(s.state())).await.map(Json)
}

async fn verbal(State(app): State<AppState>, Path(id): Path<String>, Json(req): Json<VerbalRequest>) -> Result<Json<VerbalPreview>, ApiError> {
    with_session(&app, &id, move |s| s.post_verbal(&req.text)).await.map(Json)
}

async fn advance(State(app): State<AppState>, Path(id): Path<String>, Json(req): Json<AdvanceRequest>) -> Result<Json<Advanced>, ApiError> {
    let steps = req.steps.min(MAX_ADVANCE);
    with_session(&app, &id, move |s| {
        let executed = s.advance(steps)?;
        Ok(Advanced { executed, state: s.state() })
    })
    .await
    .map(Json)
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/state", get(state))
        .route("/sessions/{id}/verbal", post(verbal))
        .route("/sessions/{id}/advance", post(advance))
        .with_state(app)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(AppState::default())).await
}
