//! JSON-over-HTTP play service backed by solved databases.
//!
//! | method | path                         | body                                |
//! |--------|------------------------------|-------------------------------------|
//! | GET    | `/health`                    |                                     |
//! | GET    | `/databases`                 |                                     |
//! | POST   | `/sessions`                  | `{"shape":"2,2,3","human":"black"}` |
//! | GET    | `/sessions/{id}`             |                                     |
//! | GET    | `/sessions/{id}/moves`       |                                     |
//! | POST   | `/sessions/{id}/moves`       | `{"move":"e,f:down"}`               |
//! | POST   | `/sessions/{id}/engine-move` |                                     |
//!
//! Unknown sessions answer 404, illegal or out-of-turn moves 409, and a
//! session request for a variant with no loaded database 503.

pub mod error;
pub mod session;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use abalone_core::{BoardShape, Color, SolvedDatabase};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

pub use error::ApiError;
pub use session::{MovesView, Session, SessionRecord, SessionView, Status, DEFAULT_PLY_CAP};

type Shared<T> = Arc<Mutex<T>>;

/// Databases, sessions and settings shared by all handlers.
pub struct AppState {
    databases: BTreeMap<(BoardShape, u8), Arc<SolvedDatabase>>,
    sessions: Mutex<HashMap<String, Shared<Session>>>,
    next_id: AtomicU64,
    ply_cap: u32,
    snapshot: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatabaseInfo {
    pub shape: String,
    pub k: u8,
    pub states: u64,
    pub start: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct NewSession {
    pub shape: String,
    #[serde(default)]
    pub k: Option<u8>,
    #[serde(default)]
    pub human: Option<String>,
    /// Starting position in board notation; defaults to the variant's start.
    #[serde(default)]
    pub start: Option<String>,
    #[serde(default)]
    pub to_move: Option<String>,
    #[serde(default)]
    pub ply_cap: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MoveRequest {
    #[serde(rename = "move")]
    pub text: String,
}

impl AppState {
    pub fn new(databases: impl IntoIterator<Item = SolvedDatabase>) -> Self {
        let databases = databases
            .into_iter()
            .map(|db| ((db.config().shape(), db.config().k()), Arc::new(db)))
            .collect();
        Self {
            databases,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            ply_cap: DEFAULT_PLY_CAP,
            snapshot: None,
        }
    }

    /// Default ply limit for new sessions.
    pub fn with_ply_cap(mut self, cap: u32) -> Self {
        self.ply_cap = cap;
        self
    }

    /// Persists sessions to `path` after every change and restores any
    /// sessions already stored there.
    pub fn with_snapshot(mut self, path: PathBuf) -> Result<Self, ApiError> {
        if path.exists() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| ApiError::BadRequest(format!("cannot read snapshot: {e}")))?;
            let records: Vec<SessionRecord> = serde_json::from_str(&text)
                .map_err(|e| ApiError::BadRequest(format!("bad snapshot: {e}")))?;
            let mut sessions = self.sessions.lock().expect("session table");
            let mut max_id = 0;
            for record in &records {
                let shape: BoardShape = record
                    .shape
                    .parse()
                    .map_err(|e| ApiError::BadRequest(format!("bad snapshot: {e}")))?;
                let db = self.database(shape, Some(record.k))?;
                let session = Session::replay(record, db)?;
                max_id = max_id.max(record.id.parse::<u64>().unwrap_or(0));
                sessions.insert(record.id.clone(), Arc::new(Mutex::new(session)));
            }
            drop(sessions);
            self.next_id = AtomicU64::new(max_id + 1);
        }
        self.snapshot = Some(path);
        Ok(self)
    }

    fn database(&self, shape: BoardShape, k: Option<u8>) -> Result<Arc<SolvedDatabase>, ApiError> {
        self.databases
            .iter()
            .find(|((s, dk), _)| *s == shape && k.is_none_or(|k| k == *dk))
            .map(|(_, db)| db.clone())
            .ok_or_else(|| {
                let k = k.map_or(String::new(), |k| format!(" K={k}"));
                ApiError::Unavailable(format!("no database loaded for {shape}{k}"))
            })
    }

    fn session(&self, id: &str) -> Result<Shared<Session>, ApiError> {
        self.sessions
            .lock()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("no session {id:?}")))
    }

    fn save_snapshot(&self) {
        let Some(path) = &self.snapshot else { return };
        let sessions: Vec<Shared<Session>> = self
            .sessions
            .lock()
            .expect("session table")
            .values()
            .cloned()
            .collect();
        let mut records: Vec<SessionRecord> = sessions
            .iter()
            .map(|s| s.lock().expect("session").record())
            .collect();
        records.sort_by_key(|r| r.id.parse::<u64>().unwrap_or(u64::MAX));
        let text = serde_json::to_string_pretty(&records).expect("records serialize");
        let tmp = path.with_extension("tmp");
        if std::fs::write(&tmp, text)
            .and_then(|_| std::fs::rename(&tmp, path))
            .is_err()
        {
            eprintln!("warning: cannot write snapshot {}", path.display());
        }
    }

    pub fn create_session(&self, request: &NewSession) -> Result<SessionView, ApiError> {
        let shape: BoardShape = request
            .shape
            .parse()
            .map_err(|e| ApiError::BadRequest(format!("{e}")))?;
        let db = self.database(shape, request.k)?;
        let parse_color = |s: &Option<String>, default| match s {
            Some(s) => s.parse::<Color>().map_err(ApiError::BadRequest),
            None => Ok(default),
        };
        let human = parse_color(&request.human, Color::Black)?;
        let to_move = parse_color(&request.to_move, Color::Black)?;
        let start = match &request.start {
            Some(text) => db
                .config()
                .parse(text)
                .map_err(|e| ApiError::BadRequest(e.to_string()))?,
            None => db.config().initial(),
        };
        db.value(&start, to_move)
            .map_err(|e| ApiError::BadRequest(e.to_string()))?;
        let id = self.next_id.fetch_add(1, Ordering::Relaxed).to_string();
        let cap = request.ply_cap.unwrap_or(self.ply_cap);
        let session = Session::new(id.clone(), db, human, start, to_move, cap);
        let view = session.view()?;
        self.sessions
            .lock()
            .expect("session table")
            .insert(id, Arc::new(Mutex::new(session)));
        self.save_snapshot();
        Ok(view)
    }

    pub fn view(&self, id: &str) -> Result<SessionView, ApiError> {
        let session = self.session(id)?;
        let view = session.lock().expect("session").view();
        view
    }

    pub fn moves(&self, id: &str) -> Result<MovesView, ApiError> {
        let session = self.session(id)?;
        let moves = session.lock().expect("session").annotated_moves();
        moves
    }

    fn mutate(
        &self,
        id: &str,
        change: impl FnOnce(&mut Session) -> Result<(), ApiError>,
    ) -> Result<SessionView, ApiError> {
        let session = self.session(id)?;
        let view = {
            let mut guard = session.lock().expect("session");
            change(&mut guard)?;
            guard.view()?
        };
        self.save_snapshot();
        Ok(view)
    }

    pub fn human_move(&self, id: &str, text: &str) -> Result<SessionView, ApiError> {
        self.mutate(id, |s| s.human_move(text))
    }

    pub fn engine_move(&self, id: &str) -> Result<SessionView, ApiError> {
        self.mutate(id, Session::engine_move)
    }

    pub fn database_list(&self) -> Vec<DatabaseInfo> {
        self.databases
            .values()
            .map(|db| {
                let config = db.config();
                DatabaseInfo {
                    shape: config.shape().to_string(),
                    k: config.k(),
                    states: db.space().len(),
                    start: config.initial().notation(config.board()),
                }
            })
            .collect()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn health() -> &'static str {
    "ok"
}

async fn list_databases(State(app): State<Arc<AppState>>) -> Json<Vec<DatabaseInfo>> {
    Json(app.database_list())
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    Json(request): Json<NewSession>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    Ok((StatusCode::CREATED, Json(app.create_session(&request)?)))
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<SessionView> {
    app.view(&id).map(Json)
}

async fn get_moves(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<MovesView> {
    app.moves(&id).map(Json)
}

async fn post_move(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(request): Json<MoveRequest>,
) -> ApiResult<SessionView> {
    app.human_move(&id, &request.text).map(Json)
}

async fn engine_move(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<SessionView> {
    app.engine_move(&id).map(Json)
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/databases", get(list_databases))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", get(get_moves).post(post_move))
        .route("/sessions/{id}/engine-move", post(engine_move))
        .with_state(app)
}

/// Serves until interrupted.
pub async fn serve(addr: SocketAddr, app: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
