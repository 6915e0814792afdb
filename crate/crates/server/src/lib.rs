//! HTTP/JSON service over one loaded front ensemble.
//!
//! Endpoints: `GET /meta`, `GET /marginal?weights=..`, `GET /slice?i=..&j=..&weights=..`,
//! `GET /domination?y=..` and `POST /decide`. Lists in query strings are
//! comma-separated; objective indices are zero-based.

pub mod session;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Query, State};
use axum::http::{header, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use polarfront_core::Error;
use serde::Serialize;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

use session::{DecideRequest, DEFAULT_LEVELS, DEFAULT_SLICE_ANGLES};
pub use session::{GridDefaults, Session};

/// Shared handle to the current session. Requests clone the inner `Arc`, so
/// a replacement never affects a request already in flight.
#[derive(Clone, Default)]
pub struct AppState {
    session: Arc<RwLock<Option<Arc<Session>>>>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_session(session: Session) -> Self {
        let s = Self::new();
        s.load(session);
        s
    }

    pub fn load(&self, session: Session) {
        let mut guard = self.session.write().unwrap_or_else(|e| e.into_inner());
        *guard = Some(Arc::new(session));
    }

    pub fn current(&self) -> Option<Arc<Session>> {
        self.session
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InsufficientData(_) => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        Self::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::new(r.status(), r.body_text())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(ErrorBody {
                error: &self.message,
            }),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;
type Params = Query<HashMap<String, String>>;

fn session(state: &AppState) -> Result<Arc<Session>, ApiError> {
    state
        .current()
        .ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no ensemble loaded"))
}

fn required<'a>(q: &'a HashMap<String, String>, key: &str) -> Result<&'a str, ApiError> {
    q.get(key)
        .map(String::as_str)
        .ok_or_else(|| ApiError::bad_request(format!("missing query parameter `{key}`")))
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>, ApiError> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| ApiError::bad_request(format!("`{key}`: cannot parse `{t}`")))
        })
        .collect()
}

fn parse_index(q: &HashMap<String, String>, key: &str) -> Result<usize, ApiError> {
    let raw = required(q, key)?;
    raw.trim()
        .parse()
        .map_err(|_| ApiError::bad_request(format!("`{key}` must be a non-negative integer")))
}

fn levels(q: &HashMap<String, String>) -> Result<Vec<f64>, ApiError> {
    match q.get("levels") {
        Some(raw) => parse_list("levels", raw),
        None => Ok(DEFAULT_LEVELS.to_vec()),
    }
}

async fn meta(State(state): State<AppState>) -> ApiResult<session::Meta> {
    Ok(Json(session(&state)?.meta()))
}

async fn marginal(State(state): State<AppState>, Query(q): Params) -> ApiResult<session::Marginal> {
    let s = session(&state)?;
    let w = parse_list("weights", required(&q, "weights")?)?;
    Ok(Json(s.marginal(&w, &levels(&q)?)?))
}

async fn slice(State(state): State<AppState>, Query(q): Params) -> ApiResult<session::Slice> {
    let s = session(&state)?;
    let (i, j) = (parse_index(&q, "i")?, parse_index(&q, "j")?);
    let w = parse_list("weights", required(&q, "weights")?)?;
    let k = match q.get("k") {
        Some(_) => parse_index(&q, "k")?,
        None => DEFAULT_SLICE_ANGLES,
    };
    Ok(Json(s.slice(i, j, &w, k, &levels(&q)?)?))
}

async fn domination(
    State(state): State<AppState>,
    Query(q): Params,
) -> ApiResult<session::Domination> {
    let s = session(&state)?;
    let y = parse_list("y", required(&q, "y")?)?;
    Ok(Json(s.domination(&y)?))
}

async fn decide(
    State(state): State<AppState>,
    body: Result<Json<DecideRequest>, JsonRejection>,
) -> ApiResult<session::DecideResponse> {
    let s = session(&state)?;
    let Json(req) = body?;
    s.decide(&req)?.map(Json).ok_or_else(|| {
        ApiError::new(
            StatusCode::CONFLICT,
            "decisions need an objective-table source",
        )
    })
}

/// The API router with permissive CORS; `static_dir`, when given, is served
/// for every other path.
pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    let api = Router::new()
        .route("/meta", get(meta))
        .route("/marginal", get(marginal))
        .route("/slice", get(slice))
        .route("/domination", get(domination))
        .route("/decide", post(decide))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(cors)
}

/// Serves `app` on `listener` until the process ends.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app).await
}
