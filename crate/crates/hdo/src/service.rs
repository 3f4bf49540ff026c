//! HTTP/JSON service that lets a person act as the decision maker.
//!
//! A session wraps one [`Run`] paused at an interaction. Checkpoints store the
//! configuration and the rankings received so far; since runs are
//! deterministic, replaying them restores the exact state.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hdo_core::orchestrator::{FinalSolution, Mode, Run, RunConfig, RunRecord, Status};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

pub const CHECKPOINT_FORMAT: &str = "hdo-session-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub id: String,
    pub config: RunConfig,
    pub rankings: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Evolving,
    AwaitingRanking,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub index: usize,
    /// All `m` objective values.
    pub objectives: Vec<f64>,
}

/// Snapshot of a session as served to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub phase: Phase,
    /// 1-based number of the pending interaction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<usize>,
    /// 1-based active objectives.
    pub active: Vec<usize>,
    pub candidates: Vec<Candidate>,
    pub evaluations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_solution: Option<FinalSolution>,
    pub history: RunRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatesResponse {
    pub id: String,
    pub interaction: usize,
    pub active: Vec<usize>,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRequest {
    pub ranks: Vec<u32>,
}

struct SessionState {
    config: RunConfig,
    run: Run,
    rankings: Vec<Vec<u32>>,
}

struct Session {
    state: Arc<Mutex<SessionState>>,
    view: RwLock<SessionView>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

impl From<hdo_core::Error> for ApiError {
    fn from(e: hdo_core::Error) -> Self {
        let status = match e {
            hdo_core::Error::State(_) => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        Self::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    checkpoint_dir: Option<PathBuf>,
}

impl AppState {
    /// Sessions are kept in memory only unless a checkpoint directory is given.
    pub fn new(checkpoint_dir: Option<PathBuf>) -> anyhow::Result<Arc<Self>> {
        if let Some(dir) = &checkpoint_dir {
            fs::create_dir_all(dir)?;
        }
        Ok(Arc::new(Self { sessions: RwLock::new(HashMap::new()), checkpoint_dir }))
    }

    /// Like [`AppState::new`], then replays every checkpoint found in `dir`.
    /// Unreadable checkpoints are skipped with a warning.
    pub fn restore(dir: PathBuf) -> anyhow::Result<Arc<Self>> {
        let app = Self::new(Some(dir.clone()))?;
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            match load_checkpoint(&path).and_then(|c| replay(c).map_err(anyhow::Error::from)) {
                Ok(state) => {
                    let id = state.0.clone();
                    app.insert(id, state.1);
                }
                Err(e) => log::warn!("skipping checkpoint {}: {e}", path.display()),
            }
        }
        Ok(app)
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("lock").keys().cloned().collect();
        ids.sort();
        ids
    }

    fn insert(&self, id: String, state: SessionState) {
        let view = view_of(&id, &state);
        let session = Session { state: Arc::new(Mutex::new(state)), view: RwLock::new(view) };
        self.sessions.write().expect("lock").insert(id, Arc::new(session));
    }

    fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .read()
            .expect("lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id}")))
    }

    fn checkpoint(&self, id: &str, state: &SessionState) -> Result<(), ApiError> {
        let Some(dir) = &self.checkpoint_dir else { return Ok(()) };
        let cp = Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            id: id.into(),
            config: state.config.clone(),
            rankings: state.rankings.clone(),
        };
        let tmp = dir.join(format!(".{id}.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(&cp).map_err(internal)?).map_err(internal)?;
        fs::rename(&tmp, dir.join(format!("{id}.json"))).map_err(internal)
    }
}

fn load_checkpoint(path: &Path) -> anyhow::Result<Checkpoint> {
    let cp: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
    anyhow::ensure!(cp.format == CHECKPOINT_FORMAT, "unsupported format {:?}", cp.format);
    Ok(cp)
}

/// Rebuilds a session by re-running its configuration with the recorded rankings.
fn replay(cp: Checkpoint) -> hdo_core::Result<(String, SessionState)> {
    let mut state = start(cp.config)?;
    for ranks in cp.rankings {
        state.run.submit_ranking(&ranks)?;
        state.rankings.push(ranks);
    }
    Ok((cp.id, state))
}

fn start(config: RunConfig) -> hdo_core::Result<SessionState> {
    if config.mode == Mode::Golden {
        return Err(hdo_core::Error::Config("golden runs have no interactions to serve".into()));
    }
    let mut run = Run::new(config.clone())?;
    run.advance()?;
    Ok(SessionState { config, run, rankings: Vec::new() })
}

fn view_of(id: &str, state: &SessionState) -> SessionView {
    let run = &state.run;
    let (phase, interaction) = match run.status() {
        Status::AwaitingRanking { interaction } => (Phase::AwaitingRanking, Some(interaction)),
        Status::Finished => (Phase::Finished, None),
        Status::NotStarted => (Phase::Evolving, None),
    };
    let candidates = run
        .pending()
        .unwrap_or_default()
        .into_iter()
        .enumerate()
        .map(|(index, v)| Candidate { index, objectives: v.into_inner() })
        .collect();
    let history = run.record().clone();
    SessionView {
        id: id.into(),
        phase,
        interaction,
        active: run.mask().one_based(),
        candidates,
        evaluations: run.counter().total(),
        final_solution: history.final_solution.clone(),
        history,
    }
}

fn new_id() -> String {
    format!("{:016x}{:016x}", rand::random::<u64>(), rand::random::<u64>())
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let config: RunConfig = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid run config: {e}")))?;
    let state = tokio::task::spawn_blocking(move || start(config)).await.map_err(internal)??;
    let id = new_id();
    app.checkpoint(&id, &state)?;
    let view = view_of(&id, &state);
    app.insert(id, state);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionView>, ApiError> {
    let session = app.get(&id)?;
    let view = session.view.read().expect("lock").clone();
    Ok(Json(view))
}

async fn get_candidates(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<CandidatesResponse>, ApiError> {
    let session = app.get(&id)?;
    let view = session.view.read().expect("lock").clone();
    match (view.phase, view.interaction) {
        (Phase::AwaitingRanking, Some(interaction)) => {
            Ok(Json(CandidatesResponse { id: view.id, interaction, active: view.active, candidates: view.candidates }))
        }
        (phase, _) => Err(ApiError::new(StatusCode::CONFLICT, format!("session is {phase:?}, not awaiting a ranking"))),
    }
}

async fn submit_ranking(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Json<SessionView>, ApiError> {
    let session = app.get(&id)?;
    let request: RankingRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid ranking: {e}")))?;
    let mut guard =
        session.state.clone().try_lock_owned().map_err(|_| {
            ApiError::new(StatusCode::CONFLICT, "a ranking for this session is already being processed")
        })?;
    let pending =
        guard.run.pending().ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "session is not awaiting a ranking"))?;
    if request.ranks.len() != pending.len() || request.ranks.contains(&0) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("expected {} positive integer ranks, got {:?}", pending.len(), request.ranks),
        ));
    }
    session.view.write().expect("lock").phase = Phase::Evolving;

    let ranks = request.ranks;
    let (guard, result) = tokio::task::spawn_blocking(move || {
        let result = guard.run.submit_ranking(&ranks);
        if result.is_ok() {
            guard.rankings.push(ranks);
        }
        (guard, result)
    })
    .await
    .map_err(internal)?;
    let view = view_of(&id, &guard);
    *session.view.write().expect("lock") = view.clone();
    result?;
    app.checkpoint(&id, &guard)?;
    Ok(Json(view))
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/candidates", get(get_candidates))
        .route("/sessions/{id}/ranking", post(submit_ranking))
        .with_state(app)
}

pub async fn serve(host: &str, port: u16, app: Arc<AppState>) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
