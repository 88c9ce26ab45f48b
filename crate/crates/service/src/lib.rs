//! Read-only HTTP delivery of controlled vocabularies.

pub mod config;
mod snapshot;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use obdm_core::store::StoreError;
use thiserror::Error;

pub use config::{SelectorConfig, VocabConfig, VocabularyConfig};
pub use snapshot::Snapshot;

use snapshot::ConceptLookup;

pub const ADMIN_TOKEN_ENV: &str = "OBDM_ADMIN_TOKEN";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid service configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Shared state: the current snapshot, swapped whole on reload.
pub struct AppState {
    config_path: PathBuf,
    admin_token: Option<String>,
    snapshot: RwLock<Option<Arc<Snapshot>>>,
}

impl AppState {
    pub fn new(config_path: PathBuf, admin_token: Option<String>) -> Self {
        Self {
            config_path,
            admin_token: admin_token.filter(|t| !t.is_empty()),
            snapshot: RwLock::new(None),
        }
    }

    pub fn current(&self) -> Option<Arc<Snapshot>> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    /// Loads config and store; on failure the previous snapshot stays.
    pub fn reload(&self) -> Result<Arc<Snapshot>, ServiceError> {
        let cfg = VocabConfig::load(&self.config_path)?;
        let snap = Arc::new(Snapshot::load(&cfg)?);
        *self.snapshot.write().expect("snapshot lock") = Some(snap.clone());
        Ok(snap)
    }
}

fn json(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, code: &str) -> Response {
    json(status, serde_json::json!({ "error": code }).to_string())
}

fn loading() -> Response {
    json(
        StatusCode::SERVICE_UNAVAILABLE,
        serde_json::json!({ "status": "loading" }).to_string(),
    )
}

async fn list_vocabularies(State(state): State<Arc<AppState>>) -> Response {
    match state.current() {
        Some(s) => json(StatusCode::OK, s.list_body.clone()),
        None => loading(),
    }
}

fn etag_matches(headers: &HeaderMap, etag: &str) -> bool {
    headers
        .get_all(header::IF_NONE_MATCH)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .flat_map(|v| v.split(','))
        .map(|t| t.trim().trim_start_matches("W/"))
        .any(|t| t == "*" || t == etag)
}

async fn vocabulary_terms(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Response {
    let Some(s) = state.current() else { return loading() };
    let Some(body) = s.terms_body(&id) else {
        return error(StatusCode::NOT_FOUND, "unknown_vocabulary");
    };
    let etag = HeaderValue::from_str(&s.etag).expect("hex etag");
    if etag_matches(&headers, &s.etag) {
        return (StatusCode::NOT_MODIFIED, [(header::ETAG, etag)]).into_response();
    }
    let mut resp = json(StatusCode::OK, body.to_string());
    resp.headers_mut().insert(header::ETAG, etag);
    resp
}

async fn concept(State(state): State<Arc<AppState>>, Path(curie): Path<String>) -> Response {
    let Some(s) = state.current() else { return loading() };
    match s.concept(&curie) {
        ConceptLookup::Found(body) => json(StatusCode::OK, body),
        ConceptLookup::BadCurie => error(StatusCode::BAD_REQUEST, "bad_curie"),
        ConceptLookup::Unknown => error(StatusCode::NOT_FOUND, "unknown_concept"),
    }
}

fn authorized(state: &AppState, headers: &HeaderMap) -> bool {
    let Some(expected) = &state.admin_token else { return false };
    headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .is_some_and(|t| t.trim() == expected)
}

async fn reload(State(state): State<Arc<AppState>>, headers: HeaderMap) -> Response {
    if !authorized(&state, &headers) {
        return error(StatusCode::UNAUTHORIZED, "unauthorized");
    }
    let worker = state.clone();
    match tokio::task::spawn_blocking(move || worker.reload()).await {
        Ok(Ok(snap)) => json(
            StatusCode::OK,
            serde_json::json!({ "reloaded": true, "version": snap.version }).to_string(),
        ),
        Ok(Err(e)) => {
            log::error!("reload failed: {e}");
            json(
                StatusCode::INTERNAL_SERVER_ERROR,
                serde_json::json!({ "error": "corrupt_store", "message": e.to_string() }).to_string(),
            )
        }
        Err(e) => {
            log::error!("reload task failed: {e}");
            error(StatusCode::INTERNAL_SERVER_ERROR, "reload_failed")
        }
    }
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    match state.current() {
        Some(s) => json(
            StatusCode::OK,
            serde_json::json!({ "status": "ok", "taxonomy_version": s.version }).to_string(),
        ),
        None => loading(),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/vocabularies", get(list_vocabularies))
        .route("/v1/vocabularies/{id}/terms", get(vocabulary_terms))
        .route("/v1/concepts/{curie}", get(concept))
        .route("/v1/reload", post(reload))
        .route("/v1/health", get(health))
        .with_state(state)
}

/// Binds, starts loading in the background and serves until the process ends.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    let loader = state.clone();
    tokio::task::spawn_blocking(move || {
        if let Err(e) = loader.reload() {
            log::error!("initial load failed: {e}");
        }
    });
    axum::serve(listener, router(state)).await
}
