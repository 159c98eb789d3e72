//! Routes and handlers.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use logichint_core::formula::parse;
use logichint_core::kernel::{validate_hint, Hint, HintVerdict, Problem, ProofStep, StepRef, StepVerdict};
use logichint_core::pss::{render, Event};
use logichint_core::rules::{Direction, RuleId};
use logichint_core::search::{next_step_hint, SearchConfig};
use logichint_gateway::Gateway;
use logichint_prompt::{parse_hint, Forge, Strategy};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::store::{now_ms, ProblemStore, Session, SessionStore, StoreError};

/// One session's current snapshot. Writers hold `write` while they build
/// and persist the next snapshot; readers only clone the `Arc`.
struct Slot {
    write: tokio::sync::Mutex<()>,
    snapshot: RwLock<Arc<Session>>,
}

impl Slot {
    fn new(session: Session) -> Arc<Slot> {
        Arc::new(Slot { write: tokio::sync::Mutex::new(()), snapshot: RwLock::new(Arc::new(session)) })
    }

    fn get(&self) -> Arc<Session> {
        self.snapshot.read().clone()
    }

    fn set(&self, session: Session) {
        *self.snapshot.write() = Arc::new(session);
    }
}

pub struct AppState {
    problems: ProblemStore,
    store: SessionStore,
    sessions: RwLock<HashMap<String, Arc<Slot>>>,
    forge: Forge,
    gateway: Option<Arc<Gateway>>,
    strategy: Strategy,
    search: SearchConfig,
}

impl AppState {
    /// Replays the sessions already in `store`. Logs that fail to replay
    /// are skipped and returned.
    pub fn new(
        problems: ProblemStore,
        store: SessionStore,
        gateway: Option<Gateway>,
        strategy: Strategy,
        search: SearchConfig,
    ) -> Result<(Arc<AppState>, Vec<StoreError>), StoreError> {
        let (loaded, skipped) = store.load_all(&problems)?;
        let sessions = loaded.into_iter().map(|(id, s)| (id, Slot::new(s))).collect();
        let state = AppState {
            problems,
            store,
            sessions: RwLock::new(sessions),
            forge: Forge::builtin(),
            gateway: gateway.map(Arc::new),
            strategy,
            search,
        };
        Ok((Arc::new(state), skipped))
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session `{id}`")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_input", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError::internal(e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(e.status(), "invalid_input", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_input", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

#[derive(Serialize)]
struct ProblemView<'a> {
    #[serde(flatten)]
    problem: &'a Problem,
    hints_allowed: bool,
}

impl<'a> ProblemView<'a> {
    fn of(problem: &'a Problem) -> Self {
        ProblemView { problem, hints_allowed: problem.level.allows_hints() }
    }
}

#[derive(Serialize)]
struct SessionView<'a> {
    id: &'a str,
    problem: ProblemView<'a>,
    derived: &'a [ProofStep],
    rendered: String,
    solved: bool,
    hint_count: usize,
    events: &'a [Event],
    created: u64,
    updated: u64,
}

impl<'a> SessionView<'a> {
    fn of(s: &'a Session) -> Self {
        SessionView {
            id: &s.id,
            problem: ProblemView::of(s.problem()),
            derived: &s.state.derived,
            rendered: render(&s.state),
            solved: s.state.is_solved(),
            hint_count: s.hint_count,
            events: &s.events,
            created: s.created,
            updated: s.updated,
        }
    }
}

pub fn router(state: Arc<AppState>, cors_origins: &[String]) -> Router {
    let origins = if cors_origins.is_empty() {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    let cors = CorsLayer::new()
        .allow_origin(origins)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([axum::http::header::CONTENT_TYPE]);
    Router::new()
        .route("/problems", get(list_problems))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/steps", post(post_step))
        .route("/sessions/{id}/hint", get(get_hint))
        .layer(cors)
        .with_state(state)
}

async fn list_problems(State(app): State<Arc<AppState>>) -> Response {
    let problems: Vec<ProblemView<'_>> = app.problems.all().iter().map(ProblemView::of).collect();
    Json(serde_json::json!({ "problems": problems })).into_response()
}

#[derive(Deserialize)]
struct CreateBody {
    problem_id: String,
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    body: Result<Json<CreateBody>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(body) = body?;
    let problem = app
        .problems
        .get(&body.problem_id)
        .ok_or_else(|| ApiError::not_found(format!("no problem `{}`", body.problem_id)))?;
    let session = Session::new(uuid::Uuid::new_v4().to_string(), problem.clone(), now_ms());
    app.store.create(&session)?;
    let view = serde_json::to_value(SessionView::of(&session)).expect("view serializes");
    app.sessions.write().insert(session.id.clone(), Slot::new(session));
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = app.slot(&id)?.get();
    Ok(Json(SessionView::of(&session)).into_response())
}

#[derive(Deserialize)]
struct StepBody {
    formula: String,
    rule: String,
    #[serde(default)]
    parents: Vec<String>,
    #[serde(default)]
    site: Option<Vec<usize>>,
    #[serde(default)]
    direction: Option<Direction>,
}

impl StepBody {
    fn to_step(&self, index: usize) -> Result<ProofStep, ApiError> {
        let formula = parse(&self.formula).map_err(|e| ApiError::unprocessable(format!("formula: {e}")))?;
        let rule: RuleId = self.rule.parse().map_err(|e| ApiError::unprocessable(format!("rule: {e}")))?;
        let parents = self
            .parents
            .iter()
            .map(|p| p.parse::<StepRef>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ApiError::unprocessable(format!("parents: {e}")))?;
        let mut step = ProofStep::new(index, formula, rule, parents);
        step.site = self.site.clone();
        step.direction = self.direction;
        Ok(step)
    }
}

#[derive(Serialize)]
struct StepResponse<'a> {
    verdict: StepVerdict,
    accepted: bool,
    complete: bool,
    session: SessionView<'a>,
}

async fn post_step(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<StepBody>, JsonRejection>,
) -> Result<Response, ApiError> {
    let slot = app.slot(&id)?;
    let Json(body) = body?;
    let _guard = slot.write.lock().await;
    let current = slot.get();
    let step = body.to_step(current.state.derived.len() + 1)?;
    let (verdict, next) = current.derive(&step);
    let session = match next {
        Some((next, event)) => {
            app.store.append(&id, &event)?;
            slot.set(next);
            slot.get()
        }
        None => current,
    };
    let accepted = verdict.is_valid();
    let complete = accepted && step.formula == session.problem().conclusion;
    let body = StepResponse { verdict, accepted, complete, session: SessionView::of(&session) };
    Ok(Json(body).into_response())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Source {
    #[default]
    Search,
    Llm,
}

#[derive(Deserialize)]
struct HintQuery {
    #[serde(default)]
    source: Source,
}

#[derive(Serialize)]
struct HintResponse {
    source: Source,
    available: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    hint: Option<Hint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<HintVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    hint_count: usize,
}

async fn get_hint(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<HintQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let slot = app.slot(&id)?;
    let Query(query) = query?;
    let level = slot.get().problem().level;
    if !level.allows_hints() {
        return Err(ApiError::new(
            StatusCode::FORBIDDEN,
            "hints_disabled",
            format!("hints are not available for {level} problems"),
        ));
    }
    let _guard = slot.write.lock().await;
    let current = slot.get();
    let state = current.state.clone();
    let (hint, message) = match query.source {
        Source::Search => {
            let search = app.search.clone();
            let hint = tokio::task::spawn_blocking(move || next_step_hint(&state, &search))
                .await
                .map_err(|e| ApiError::internal(e.to_string()))?;
            let message = hint.is_none().then(|| "no hint available".to_owned());
            (hint, message)
        }
        Source::Llm => {
            let gateway = app.gateway.clone().ok_or_else(|| {
                ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "backend_unavailable", "no model backend is configured")
            })?;
            let bundle = app.forge.hint(&state, app.strategy).map_err(|e| ApiError::internal(e.to_string()))?;
            let completion = tokio::task::spawn_blocking(move || gateway.complete(&bundle))
                .await
                .map_err(|e| ApiError::internal(e.to_string()))?;
            let text = completion.result().map_err(|e| {
                ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "backend_unavailable", e.to_string())
            })?;
            let parsed = parse_hint(text);
            let message = parsed.error.map(|e| format!("the model's answer could not be read: {e}"));
            (parsed.hint, message)
        }
    };
    let hint = hint.map(|mut h| {
        h.step.index = current.state.derived.len() + 1;
        h
    });
    let verdict = hint.as_ref().map(|h| validate_hint(&current.state, &h.step));
    let (next, event) = current.hint_requested();
    app.store.append(&id, &event)?;
    let hint_count = next.hint_count;
    slot.set(next);
    let body = HintResponse { source: query.source, available: hint.is_some(), hint, verdict, message, hint_count };
    Ok(Json(body).into_response())
}
