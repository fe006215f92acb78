use std::sync::{Arc, Mutex, MutexGuard, PoisonError};

use axum::extract::rejection::{JsonRejection, StringRejection};
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use statetest_core::sim::TakenTransition;
use statetest_core::{
    load_model, DiagCode, Diagnostic, Env, Session, SimError, SourceText, Span, StateRef, Status,
    Stimulus, TraceEntry,
};

use crate::store::{now_ms, SessionCell, StoredModel, StoredSession};
use crate::view::DiagramView;
use crate::AppState;

pub(crate) fn routes(body_limit: usize) -> Router<AppState> {
    Router::new()
        .route("/models", post(create_model))
        .route("/models/{id}", get(get_model))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/stimulus", post(apply_stimulus))
        .route("/sessions/{id}/reset", post(reset_session))
        .layer(DefaultBodyLimit::max(body_limit))
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    code: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    span: Option<Span>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<Diagnostic>,
}

#[derive(Debug)]
pub(crate) struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                span: None,
                diagnostics: Vec::new(),
            },
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "E_NOT_FOUND",
            format!("no {what} `{id}`"),
        )
    }

    fn diagnostics(diags: Vec<Diagnostic>) -> Self {
        let first = diags
            .first()
            .cloned()
            .unwrap_or_else(|| Diagnostic::new(DiagCode::Syntax, "invalid model"));
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: ErrorBody {
                code: first.code.as_str().to_string(),
                message: first.message,
                span: first.span,
                diagnostics: diags,
            },
        }
    }
}

impl From<SimError> for ApiError {
    fn from(e: SimError) -> Self {
        let status = match e {
            SimError::AlreadyEntered
            | SimError::NotRunning { .. }
            | SimError::MicrostepLimit { .. } => StatusCode::CONFLICT,
            SimError::UnknownVar(_)
            | SimError::Type { .. }
            | SimError::UnknownEvent(_)
            | SimError::UnknownState(_) => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.code().as_str(), e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        let status = e.status();
        let code = if status == StatusCode::PAYLOAD_TOO_LARGE {
            "E_TOO_LARGE"
        } else {
            "E_BAD_REQUEST"
        };
        ApiError::new(status, code, e.body_text())
    }
}

impl From<StringRejection> for ApiError {
    fn from(e: StringRejection) -> Self {
        let status = e.status();
        let code = if status == StatusCode::PAYLOAD_TOO_LARGE {
            "E_TOO_LARGE"
        } else {
            "E_BAD_REQUEST"
        };
        ApiError::new(status, code, e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(PoisonError::into_inner)
}

impl AppState {
    fn session(&self, id: &str) -> Result<SessionCell, ApiError> {
        lock(&self.store)
            .sessions
            .get(id)
            .ok_or_else(|| ApiError::not_found("session", id))
    }
}

#[derive(Serialize)]
struct ModelCreated {
    model_id: String,
    name: String,
    diagram: DiagramView,
}

async fn create_model(
    State(state): State<AppState>,
    body: Result<String, StringRejection>,
) -> ApiResult<ModelCreated> {
    let source = body?;
    let model = load_model(&SourceText::new(source.as_str())).map_err(ApiError::diagnostics)?;
    let diagram = DiagramView::of(&model);
    let name = model.name.clone();
    let mut store = lock(&state.store);
    let model_id = store.fresh_id("m");
    store
        .models
        .insert(model_id.clone(), Arc::new(StoredModel { model, source }));
    Ok(Json(ModelCreated {
        model_id,
        name,
        diagram,
    }))
}

#[derive(Serialize)]
struct ModelDetail {
    model_id: String,
    name: String,
    source: String,
    diagram: DiagramView,
}

async fn get_model(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<ModelDetail> {
    let stored = lock(&state.store)
        .models
        .get(&id)
        .ok_or_else(|| ApiError::not_found("model", &id))?;
    Ok(Json(ModelDetail {
        model_id: id,
        name: stored.model.name.clone(),
        source: stored.source.clone(),
        diagram: DiagramView::of(&stored.model),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    model_id: String,
}

#[derive(Serialize)]
struct SessionView {
    session_id: String,
    model_id: String,
    created_at_ms: u64,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    fault: Option<DiagCode>,
    active: StateRef,
    env: Env,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceEntry>>,
}

fn view(id: &str, stored: &StoredSession, with_trace: bool) -> SessionView {
    let session = &stored.session;
    SessionView {
        session_id: id.to_string(),
        model_id: stored.model_id.clone(),
        created_at_ms: stored.created_at_ms,
        status: session.status(),
        fault: session.status().fault(),
        active: session.active().clone(),
        env: session.env().clone(),
        trace: with_trace.then(|| session.trace().to_vec()),
    }
}

async fn create_session(
    State(state): State<AppState>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<SessionView> {
    let Json(request) = payload?;
    let stored = lock(&state.store)
        .models
        .get(&request.model_id)
        .ok_or_else(|| ApiError::not_found("model", &request.model_id))?;
    let mut session = Session::new(stored.model.clone());
    session.enter()?;
    let stored = StoredSession {
        model_id: request.model_id,
        created_at_ms: now_ms(),
        session,
    };
    let mut store = lock(&state.store);
    let id = store.fresh_id("s");
    let response = view(&id, &stored, false);
    store.sessions.insert(id, Arc::new(Mutex::new(stored)));
    Ok(Json(response))
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<SessionView> {
    let cell = state.session(&id)?;
    let stored = lock(&cell);
    Ok(Json(view(&id, &stored, true)))
}

#[derive(Serialize)]
struct StimulusOutcome {
    session_id: String,
    status: Status,
    active: StateRef,
    env: Env,
    taken: Vec<TakenTransition>,
}

async fn apply_stimulus(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<Stimulus>, JsonRejection>,
) -> ApiResult<StimulusOutcome> {
    let cell = state.session(&id)?;
    let Json(stimulus) = payload?;
    let mut stored = lock(&cell);
    let session = &mut stored.session;
    let taken = session.apply(&stimulus)?.taken.clone();
    Ok(Json(StimulusOutcome {
        session_id: id,
        status: session.status(),
        active: session.active().clone(),
        env: session.env().clone(),
        taken,
    }))
}

async fn reset_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<SessionView> {
    let cell = state.session(&id)?;
    let mut stored = lock(&cell);
    stored.session.reset()?;
    Ok(Json(view(&id, &stored, true)))
}
