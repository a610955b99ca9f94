//! JSON API over the tutor, argument checker and exercise corpus.

use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, Request, State};
use axum::http::StatusCode;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use formtutor_core::argue::check_argument;
use formtutor_core::autoform::{BackendConfig, PromptTemplate};
use formtutor_core::corpus::Notation;
use formtutor_core::formula::Formula;
use formtutor_core::prover::ProofBudget;
use formtutor_core::signature::LogicKind;
use formtutor_core::tutor::{check_deformalization, check_formalization, ParseStatus};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::config::Corpus;

pub struct AppState {
    pub corpus: Corpus,
    pub backend: BackendConfig,
    pub budget: ProofBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    BadRequest,
    NotFound,
    ParseError,
    Internal,
}

#[derive(Debug)]
pub struct ApiError {
    kind: ErrorKind,
    message: String,
    details: Value,
}

impl ApiError {
    fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        ApiError {
            kind,
            message: message.into(),
            details: Value::Null,
        }
    }

    fn status(&self) -> StatusCode {
        match self.kind {
            ErrorKind::BadRequest => StatusCode::BAD_REQUEST,
            ErrorKind::NotFound => StatusCode::NOT_FOUND,
            ErrorKind::ParseError => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"kind": self.kind, "message": self.message, "details": self.details}});
        (self.status(), Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(ErrorKind::BadRequest, r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::new(ErrorKind::BadRequest, r.body_text())
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: AppState, static_dir: Option<&std::path::Path>) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/exercises", get(list_exercises))
        .route("/exercises/{id}", get(show_exercise))
        .route("/exercises/{id}/deformalization", post(deformalization))
        .route("/exercises/{id}/formalization", post(formalization))
        .route("/arguments", get(list_arguments))
        .route("/arguments/{id}", post(argument))
        .fallback(|| async { ApiError::new(ErrorKind::NotFound, "no such endpoint") });
    let app = Router::new().nest("/api", api).with_state(Arc::new(state));
    let app = match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    };
    app.layer(middleware::from_fn(log_request))
}

/// Logs method, path and status only; bodies and query strings may carry
/// user text and are never written out.
async fn log_request(req: Request, next: Next) -> Response {
    let method = req.method().clone();
    let path = req.uri().path().to_string();
    let start = Instant::now();
    let res = next.run(req).await;
    tracing::info!(%method, %path, status = res.status().as_u16(), elapsed_ms = start.elapsed().as_millis() as u64);
    res
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(ErrorKind::Internal, e.to_string()))
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Deformalize,
    Formalize,
}

#[derive(Debug, Serialize)]
struct ExerciseSummary {
    id: String,
    kind: LogicKind,
    modes: [Mode; 2],
}

async fn list_exercises(State(st): State<Shared>) -> Json<Vec<ExerciseSummary>> {
    Json(
        st.corpus
            .exercises
            .values()
            .map(|ex| ExerciseSummary {
                id: ex.id.clone(),
                kind: ex.signature.kind,
                modes: [Mode::Deformalize, Mode::Formalize],
            })
            .collect(),
    )
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeQuery {
    mode: Option<Mode>,
}

/// The exercise as shown to a student: the formula in deformalize mode,
/// the sentence in formalize mode, never both.
#[derive(Debug, Serialize)]
struct ExerciseView {
    id: String,
    kind: LogicKind,
    mode: Mode,
    notation: Notation,
    #[serde(skip_serializing_if = "Option::is_none")]
    formula: Option<Formula>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sentence: Option<String>,
}

fn unknown(what: &str, id: &str) -> ApiError {
    ApiError::new(ErrorKind::NotFound, format!("unknown {what} `{id}`"))
}

async fn show_exercise(
    State(st): State<Shared>,
    Path(id): Path<String>,
    query: Result<Query<ModeQuery>, QueryRejection>,
) -> ApiResult<ExerciseView> {
    let mode = query?.0.mode.unwrap_or(Mode::Deformalize);
    let ex = st.corpus.exercises.get(&id).ok_or_else(|| unknown("exercise", &id))?;
    Ok(Json(ExerciseView {
        id: ex.id.clone(),
        kind: ex.signature.kind,
        mode,
        notation: Notation::of(&ex.signature),
        formula: (mode == Mode::Deformalize).then(|| ex.gold.clone()),
        sentence: (mode == Mode::Formalize).then(|| ex.sentence.clone()),
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TextRequest {
    text: String,
}

async fn deformalization(
    State(st): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<TextRequest>, JsonRejection>,
) -> ApiResult<formtutor_core::tutor::DeformalizationReport> {
    let Json(req) = body?;
    let ex = st.corpus.exercises.get(&id).ok_or_else(|| unknown("exercise", &id))?.clone();
    let st = st.clone();
    let report = blocking(move || {
        let tpl = PromptTemplate::instruction_for(&ex.signature);
        check_deformalization(&ex, &req.text, &st.backend, &tpl, &st.budget)
    })
    .await?;
    Ok(Json(report))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormulaRequest {
    formula: String,
}

async fn formalization(
    State(st): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<FormulaRequest>, JsonRejection>,
) -> ApiResult<formtutor_core::tutor::FormalizationReport> {
    let Json(req) = body?;
    let ex = st.corpus.exercises.get(&id).ok_or_else(|| unknown("exercise", &id))?.clone();
    let budget = st.budget;
    let report = blocking(move || check_formalization(&ex, &req.formula, &budget)).await?;
    if report.parse_status == ParseStatus::Errors {
        return Err(ApiError {
            kind: ErrorKind::ParseError,
            message: report.message.clone(),
            details: json!(report.errors),
        });
    }
    Ok(Json(report))
}

#[derive(Debug, Serialize)]
struct ArgumentSummary {
    id: String,
    notation: Notation,
    premises: Vec<String>,
    goal_sentence: String,
}

async fn list_arguments(State(st): State<Shared>) -> Json<Vec<ArgumentSummary>> {
    Json(
        st.corpus
            .arguments
            .values()
            .map(|a| ArgumentSummary {
                id: a.id.clone(),
                notation: Notation::of(&a.signature),
                premises: a.premises.iter().map(|p| p.sentence.clone()).collect(),
                goal_sentence: a.goal_sentence.clone(),
            })
            .collect(),
    )
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepsRequest {
    steps: Vec<String>,
}

async fn argument(
    State(st): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<StepsRequest>, JsonRejection>,
) -> ApiResult<formtutor_core::argue::ArgumentReport> {
    let Json(req) = body?;
    let ex = st.corpus.arguments.get(&id).ok_or_else(|| unknown("argument", &id))?.clone();
    if req.steps.is_empty() {
        return Err(ApiError::new(ErrorKind::BadRequest, "at least one step is required"));
    }
    let st = st.clone();
    let report = blocking(move || {
        let tpl = PromptTemplate::instruction_for(&ex.signature);
        check_argument(&ex, &req.steps, &st.backend, &tpl)
    })
    .await?;
    Ok(Json(report))
}
