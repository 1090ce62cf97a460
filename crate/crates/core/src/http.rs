//! JSON-over-HTTP front end for [`SessionStore`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::hierarchy::GrowthParams;
use crate::session::{CorpusUpload, FilterRequest, ParamOverrides, Session, SessionStore};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainBody {
    #[serde(default)]
    pub params: GrowthParams,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefineBody {
    #[serde(default)]
    pub overrides: ParamOverrides,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

pub fn status_of(err: &Error) -> StatusCode {
    match err {
        Error::NotFound(_) => StatusCode::NOT_FOUND,
        Error::MalformedPath(_) => StatusCode::BAD_REQUEST,
        Error::Conflict(_) | Error::Fingerprint { .. } => StatusCode::CONFLICT,
        Error::Precondition(_) => StatusCode::PRECONDITION_FAILED,
        Error::Delivery(_) => StatusCode::BAD_GATEWAY,
        Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        Error::Contract(_)
        | Error::Parse { .. }
        | Error::Validation { .. }
        | Error::Config(_)
        | Error::Snapshot(_)
        | Error::Json(_) => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

pub struct ApiError(pub Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = status_of(&self.0);
        let mut body = json!({ "error": self.0.to_string() });
        match &self.0 {
            Error::Parse { line, .. } | Error::Validation { line, .. } => body["line"] = json!(line),
            Error::Fingerprint { expected, found } => {
                body["expected"] = json!(expected);
                body["found"] = json!(found);
            }
            _ => {}
        }
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;
type Store = Arc<SessionStore>;

// Session work is CPU-bound; keep it off the async workers.
async fn blocking<T, F>(store: &Store, id: &str, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Session) -> crate::Result<T> + Send + 'static,
{
    let session = store.get(id)?;
    tokio::task::spawn_blocking(move || f(&session))
        .await
        .map_err(|e| ApiError(Error::Contract(format!("worker failed: {e}"))))?
        .map_err(ApiError)
}

async fn create(State(store): State<Store>) -> (StatusCode, Json<Created>) {
    let s = store.create();
    (StatusCode::CREATED, Json(Created { id: s.id().to_string() }))
}

async fn upload_data(State(store): State<Store>, Path(id): Path<String>, body: String) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, move |s| s.upload_data(&body)).await?))
}

async fn upload_corpus(
    State(store): State<Store>,
    Path(id): Path<String>,
    Json(body): Json<CorpusUpload>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, move |s| s.upload_corpus(body)).await?))
}

async fn train(State(store): State<Store>, Path(id): Path<String>, Json(body): Json<TrainBody>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, move |s| s.train(body.params, body.seed)).await?))
}

async fn hierarchy(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, |s| s.hierarchy()).await?))
}

async fn samples(State(store): State<Store>, Path((id, path)): Path<(String, String)>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, move |s| s.samples(&path)).await?))
}

async fn refine(
    State(store): State<Store>,
    Path((id, path)): Path<(String, String)>,
    Json(body): Json<RefineBody>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, move |s| s.refine(&path, body.overrides, body.seed)).await?))
}

async fn rules(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, |s| s.rules()).await?))
}

async fn filter(
    State(store): State<Store>,
    Path(id): Path<String>,
    Json(body): Json<FilterRequest>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, move |s| s.filter(body)).await?))
}

async fn export_snapshot(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let bytes = blocking(&store, &id, |s| s.export_snapshot()).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes))
}

async fn import_snapshot(State(store): State<Store>, Path(id): Path<String>, body: Bytes) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, &id, move |s| s.import_snapshot(&body)).await?))
}

async fn audit(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.get(&id)?.audit()))
}

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/data", post(upload_data))
        .route("/sessions/{id}/corpus", post(upload_corpus))
        .route("/sessions/{id}/train", post(train))
        .route("/sessions/{id}/hierarchy", get(hierarchy))
        .route("/sessions/{id}/nodes/{path}/samples", get(samples))
        .route("/sessions/{id}/nodes/{path}/refine", post(refine))
        .route("/sessions/{id}/rules", get(rules))
        .route("/sessions/{id}/filter", post(filter))
        .route("/sessions/{id}/snapshot", get(export_snapshot).put(import_snapshot))
        .route("/sessions/{id}/audit", get(audit))
        .with_state(store)
}

pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(SessionStore::new()))).await
}
