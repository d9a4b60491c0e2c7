//! HTTP routes over an in-memory session store.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;

use crate::session::{Hint, MoveView, Session, SessionError, SessionSpec, StateView, DEFAULT_SOLVER_LIMIT};

#[derive(Debug, Clone, Copy)]
pub struct ServiceConfig {
    /// Sessions kept before the least recently used one is dropped.
    pub max_sessions: usize,
    /// Largest host on which the exact solver plays or gives hints.
    pub solver_limit: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { max_sessions: 256, solver_limit: DEFAULT_SOLVER_LIMIT }
    }
}

type Shared = Arc<Mutex<Session>>;

#[derive(Default)]
struct Store {
    tick: u64,
    sessions: HashMap<String, (u64, Shared)>,
}

impl Store {
    fn get(&mut self, id: &str) -> Option<Shared> {
        self.tick += 1;
        let tick = self.tick;
        self.sessions.get_mut(id).map(|(used, s)| {
            *used = tick;
            Arc::clone(s)
        })
    }

    fn insert(&mut self, session: Session, cap: usize) -> Shared {
        while self.sessions.len() >= cap.max(1) {
            let oldest = self.sessions.iter().min_by_key(|(_, (used, _))| *used).map(|(id, _)| id.clone());
            match oldest {
                Some(id) => self.sessions.remove(&id),
                None => break,
            };
        }
        self.tick += 1;
        let id = session.id().to_string();
        let shared = Arc::new(Mutex::new(session));
        self.sessions.insert(id, (self.tick, Arc::clone(&shared)));
        shared
    }
}

/// Router state: configuration plus the session store.
#[derive(Clone, Default)]
pub struct AppState {
    config: ServiceConfig,
    store: Arc<Mutex<Store>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState { config, store: Arc::default() }
    }

    fn lookup(&self, id: &str) -> Result<Shared, ApiError> {
        self.store
            .lock()
            .expect("store lock")
            .get(id)
            .ok_or_else(|| ApiError(SessionError::NotFound(id.to_string())))
    }

    pub fn session_count(&self) -> usize {
        self.store.lock().expect("store lock").sessions.len()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show).delete(remove))
        .route("/sessions/{id}/moves", post(play))
        .route("/sessions/{id}/hint", get(hint))
        .with_state(state)
}

pub struct ApiError(pub SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let message = self.0.to_string();
        let (status, body) = match self.0 {
            SessionError::NotFound(_) => (StatusCode::NOT_FOUND, json!({ "error": message })),
            SessionError::BadRequest(_) => (StatusCode::BAD_REQUEST, json!({ "error": message })),
            SessionError::Illegal { legal, nearest, .. } => (
                StatusCode::CONFLICT,
                json!({ "error": message, "legal_moves": legal, "nearest": nearest }),
            ),
            SessionError::NotYourTurn(_) | SessionError::Finished(_) => {
                (StatusCode::CONFLICT, json!({ "error": message }))
            }
            SessionError::TooLarge { .. } => (StatusCode::PAYLOAD_TOO_LARGE, json!({ "error": message })),
            SessionError::Unavailable(_) => (StatusCode::UNPROCESSABLE_ENTITY, json!({ "error": message })),
            SessionError::Engine(_) => (StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": message })),
        };
        (status, Json(body)).into_response()
    }
}

/// Runs session work off the async executor; engine replies can be slow.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, SessionError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(SessionError::Engine(e.to_string())))?
        .map_err(ApiError)
}

async fn create(
    State(app): State<AppState>,
    Json(spec): Json<SessionSpec>,
) -> Result<(StatusCode, Json<StateView>), ApiError> {
    let limit = app.config.solver_limit;
    let session = blocking(move || Session::create(format!("{:032x}", rand::random::<u128>()), &spec, limit)).await?;
    let view = session.view();
    app.store.lock().expect("store lock").insert(session, app.config.max_sessions);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn show(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<StateView>, ApiError> {
    let shared = app.lookup(&id)?;
    blocking(move || Ok(shared.lock().expect("session lock").view())).await.map(Json)
}

async fn play(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(mv): Json<MoveView>,
) -> Result<Json<StateView>, ApiError> {
    let shared = app.lookup(&id)?;
    blocking(move || {
        let mut session = shared.lock().expect("session lock");
        session.play(mv)?;
        Ok(session.view())
    })
    .await
    .map(Json)
}

async fn hint(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Hint>, ApiError> {
    let shared = app.lookup(&id)?;
    blocking(move || shared.lock().expect("session lock").hint()).await.map(Json)
}

async fn remove(State(app): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    match app.store.lock().expect("store lock").sessions.remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError(SessionError::NotFound(id))),
    }
}
