//! HTTP API for the ballot UI.
//!
//! - `GET /api/elections`: metadata for every stored election.
//! - `GET /api/elections/{id}`: candidates, groups, how-to-vote cards.
//! - `GET /api/elections/{id}/transcript?rules=NAME`: the full count.
//! - `POST /api/elections/{id}/trace`: journey of one hypothetical ballot.
//!
//! Errors are `{"code": ..., "message": ...}`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use stv_core::data::{AtlMarks, GroupId};
use stv_core::journey::{trace_journey_with_baseline, JourneyError};
use stv_core::{CandidateId, HypotheticalBallot, RuleSet};
use tower_http::services::ServeDir;

use crate::config::Config;
use crate::store::{ElectionMeta, ElectionStore, StoreError};

pub struct AppState {
    pub store: ElectionStore,
    pub config: Config,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl ToString) -> Self {
        ApiError {
            status,
            code,
            message: message.to_string(),
        }
    }

    fn bad_request(message: impl ToString) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad-request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownElection(_) => Self::new(StatusCode::NOT_FOUND, "not-found", e),
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "store-error", e),
        }
    }
}

impl From<JourneyError> for ApiError {
    fn from(e: JourneyError) -> Self {
        match e {
            JourneyError::Informal { .. } => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "informal-ballot", e)
            }
            JourneyError::InvalidBallot(_) => {
                Self::new(StatusCode::BAD_REQUEST, "invalid-ballot", e)
            }
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "count-error", e),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlRank {
    pub group: usize,
    pub rank: u32,
}

/// Exactly one of `preferences` (candidate ids in order) and `atl` (group
/// ranks) must be present.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRequest {
    #[serde(default)]
    pub preferences: Option<Vec<usize>>,
    #[serde(default)]
    pub atl: Option<Vec<AtlRank>>,
    #[serde(default)]
    pub rules: Option<String>,
}

#[derive(Deserialize)]
struct RulesQuery {
    rules: Option<String>,
}

#[derive(Serialize)]
struct CandidateView<'a> {
    id: usize,
    name: &'a str,
    group: Option<usize>,
}

#[derive(Serialize)]
struct GroupView<'a> {
    id: usize,
    name: &'a str,
    candidates: Vec<usize>,
}

#[derive(Serialize)]
struct CardView<'a> {
    party: &'a str,
    preferences: Vec<usize>,
}

#[derive(Serialize)]
struct ElectionDetail<'a> {
    id: &'a str,
    name: &'a str,
    year: Option<u32>,
    region: Option<&'a str>,
    vacancies: usize,
    candidates: Vec<CandidateView<'a>>,
    groups: Vec<GroupView<'a>>,
    htv: Vec<CardView<'a>>,
    rules: Vec<String>,
    default_rules: &'a str,
}

fn ids(v: &[CandidateId]) -> Vec<usize> {
    v.iter().map(|c| c.0).collect()
}

fn json_text(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn rules<'a>(state: &'a AppState, name: Option<&str>) -> Result<&'a RuleSet, ApiError> {
    state
        .config
        .resolve(name)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "unknown-rules", e))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e))?
}

async fn list(State(state): State<Arc<AppState>>) -> Json<Vec<ElectionMeta>> {
    Json(state.store.list())
}

async fn detail(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    state.store.meta(&id)?;
    let s = state.clone();
    let key = id.clone();
    let data = blocking(move || Ok(s.store.election(&key)?)).await?;
    let body = ElectionDetail {
        id: &id,
        name: data.name(),
        year: data.year(),
        region: data.region(),
        vacancies: data.vacancies(),
        groups: data
            .groups()
            .iter()
            .map(|g| GroupView {
                id: g.id.0,
                name: &g.name,
                candidates: ids(&g.candidates),
            })
            .collect(),
        candidates: data
            .candidates()
            .iter()
            .map(|c| CandidateView {
                id: c.id.0,
                name: &c.name,
                group: c.group.map(|g| g.0),
            })
            .collect(),
        htv: data
            .htv_cards()
            .iter()
            .map(|c| CardView {
                party: &c.party,
                preferences: ids(&c.preferences),
            })
            .collect(),
        rules: state.config.rule_names(),
        default_rules: &state.config.default_rules,
    };
    Ok(Json(body).into_response())
}

async fn transcript(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(query): Query<RulesQuery>,
) -> Result<Response, ApiError> {
    state.store.meta(&id)?;
    let rules = rules(&state, query.rules.as_deref())?.clone();
    let t = blocking(move || Ok(state.store.baseline(&id, &rules)?)).await?;
    Ok(json_text(t.to_json()))
}

fn ballot_from_request(
    data: &stv_core::ElectionData,
    req: TraceRequest,
) -> Result<HypotheticalBallot, ApiError> {
    let prefs = match (req.preferences, req.atl) {
        (Some(p), None) => p.into_iter().map(CandidateId).collect(),
        (None, Some(marks)) => {
            let mut ranks = std::collections::BTreeMap::new();
            for m in marks {
                if ranks.insert(GroupId(m.group), m.rank).is_some() {
                    return Err(ApiError::bad_request(format!(
                        "group {} ranked twice",
                        m.group
                    )));
                }
            }
            AtlMarks::new(ranks)
                .and_then(|m| m.expand(data))
                .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid-ballot", e))?
        }
        _ => {
            return Err(ApiError::bad_request(
                "exactly one of \"preferences\" and \"atl\" is required",
            ))
        }
    };
    Ok(HypotheticalBallot::new(prefs, data)?)
}

async fn trace(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<TraceRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    state.store.meta(&id)?;
    let Json(req) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let rules = rules(&state, req.rules.as_deref())?.clone();
    let report = blocking(move || {
        let data = state.store.election(&id)?;
        let ballot = ballot_from_request(&data, req)?;
        ballot.check_formal(&rules)?;
        let baseline = state.store.baseline(&id, &rules)?;
        Ok(trace_journey_with_baseline(
            &data, &baseline, &ballot, &rules,
        )?)
    })
    .await?;
    Ok(json_text(report.to_json()))
}

async fn placeholder() -> Html<&'static str> {
    Html(
        "<!doctype html><title>stv</title>\
         <p>No UI bundle configured. Start with <code>--ui-dir</code> or use the \
         <a href=\"/api/elections\">API</a>.</p>",
    )
}

async fn api_not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such endpoint")
}

pub fn router(state: Arc<AppState>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/elections", get(list))
        .route("/elections/{id}", get(detail))
        .route("/elections/{id}/transcript", get(transcript))
        .route("/elections/{id}/trace", post(trace))
        .fallback(api_not_found);
    let app = Router::new().nest("/api", api);
    let app = match ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.route("/", get(placeholder)),
    };
    app.with_state(state)
}

pub async fn serve(state: Arc<AppState>, port: u16, ui_dir: Option<PathBuf>) -> anyhow::Result<()> {
    use anyhow::Context;
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("cannot listen on port {port}"))?;
    eprintln!(
        "serving {} elections from {} on http://{}",
        state.store.list().len(),
        state.store.root().display(),
        listener.local_addr()?
    );
    axum::serve(listener, router(state, ui_dir)).await?;
    Ok(())
}
