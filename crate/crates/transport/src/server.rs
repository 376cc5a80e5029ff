//! HTTP ingest service.
//!
//! - `POST /api/v1/ingest`: envelope JSON in, `{"status":"ok","stored":N}` out
//! - `GET /api/v1/devices/{device_id}/blob`: raw stored ciphertext
//! - `GET /api/v1/devices/{device_id}/meta`: `seq ts_ms plaintext_len offset length` lines
//! - `GET /health`
//!
//! The server decodes Base64 and checks envelope invariants, then appends
//! the ciphertext as-is. It holds no keys.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use katanpipe_core::decode_envelope;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

use crate::store::{BlobStore, StoreError};

pub const DEFAULT_MAX_PAYLOAD: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub addr: SocketAddr,
    pub data_dir: PathBuf,
    /// Largest accepted decoded payload, in bytes.
    pub max_payload: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IngestStatus {
    Ok,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestResult {
    pub status: IngestStatus,
    #[serde(rename = "stored", default)]
    pub stored_bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl IngestResult {
    fn ok(stored_bytes: u64) -> Self {
        IngestResult {
            status: IngestStatus::Ok,
            stored_bytes,
            reason: None,
        }
    }

    fn rejected(reason: &str) -> Self {
        IngestResult {
            status: IngestStatus::Rejected,
            stored_bytes: 0,
            reason: Some(reason.to_string()),
        }
    }
}

fn store_status(e: &StoreError) -> StatusCode {
    match e {
        StoreError::InvalidDeviceId(_) => StatusCode::BAD_REQUEST,
        StoreError::UnknownDevice(_) => StatusCode::NOT_FOUND,
        StoreError::CorruptMeta(_) | StoreError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

/// Validates one request body and persists it. Blocking: does file I/O.
pub fn ingest(store: &BlobStore, body: &str, max_payload: usize) -> (StatusCode, IngestResult) {
    let (ciphertext, meta) = match decode_envelope(body) {
        Ok(v) => v,
        Err(e) => return (StatusCode::BAD_REQUEST, IngestResult::rejected(e.kind())),
    };
    if ciphertext.len() > max_payload {
        return (StatusCode::PAYLOAD_TOO_LARGE, IngestResult::rejected("PayloadTooLarge"));
    }
    match store.append(&meta, &ciphertext) {
        Ok(record) => {
            tracing::debug!(device = %meta.device_id, seq = meta.seq, bytes = record.length, "stored");
            (StatusCode::OK, IngestResult::ok(record.length))
        }
        Err(e) => {
            tracing::warn!(device = %meta.device_id, error = %e, "ingest failed");
            (store_status(&e), IngestResult::rejected(e.kind()))
        }
    }
}

#[derive(Clone)]
struct AppState {
    store: Arc<BlobStore>,
    max_payload: usize,
}

async fn ingest_handler(State(state): State<AppState>, body: Bytes) -> Response {
    let Ok(text) = String::from_utf8(body.to_vec()) else {
        return (StatusCode::BAD_REQUEST, Json(IngestResult::rejected("MalformedJson"))).into_response();
    };
    let result = tokio::task::spawn_blocking(move || ingest(&state.store, &text, state.max_payload)).await;
    match result {
        Ok((status, r)) => (status, Json(r)).into_response(),
        Err(_) => (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(IngestResult::rejected("StorageFailure")),
        )
            .into_response(),
    }
}

fn store_error_response(e: StoreError) -> Response {
    (store_status(&e), format!("error: {}\n", e.kind())).into_response()
}

async fn blob_handler(State(state): State<AppState>, Path(device_id): Path<String>) -> Response {
    match tokio::task::spawn_blocking(move || state.store.read_blob(&device_id)).await {
        Ok(Ok(bytes)) => ([(header::CONTENT_TYPE, "application/octet-stream")], bytes).into_response(),
        Ok(Err(e)) => store_error_response(e),
        Err(_) => StatusCode::INTERNAL_SERVER_ERROR.into_response(),
    }
}

async fn meta_handler(State(state): State<AppState>, Path(device_id): Path<String>) -> Response {
    match tokio::task::spawn_blocking(move || state.store.read_meta(&device_id)).await {
        Ok(Ok(records)) => {
            let text: String = records.iter().map(|r| format!("{r}\n")).collect();
            ([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response()
        }
        Ok(Err(e)) => store_error_response(e),
        Err(_) => StatusCode::INTERNAL_SERVER_ERROR.into_response(),
    }
}

async fn health() -> &'static str {
    "ok"
}

pub fn router(store: Arc<BlobStore>, max_payload: usize) -> Router {
    // Base64 grows data by 4/3; leave room for the other JSON fields.
    let body_limit = max_payload / 3 * 4 + 8 * 1024;
    Router::new()
        .route("/api/v1/ingest", post(ingest_handler))
        .route("/api/v1/devices/{device_id}/blob", get(blob_handler))
        .route("/api/v1/devices/{device_id}/meta", get(meta_handler))
        .route("/health", get(health))
        .layer(DefaultBodyLimit::max(body_limit))
        .with_state(AppState { store, max_payload })
}

/// Serves on an already-bound listener until the task is dropped.
pub async fn serve_on(listener: TcpListener, store: Arc<BlobStore>, max_payload: usize) -> std::io::Result<()> {
    axum::serve(listener, router(store, max_payload)).await
}

pub async fn serve(config: ServerConfig) -> std::io::Result<()> {
    let store = Arc::new(BlobStore::open(&config.data_dir)?);
    let listener = TcpListener::bind(config.addr).await?;
    tracing::info!(addr = %listener.local_addr()?, data = %config.data_dir.display(), "listening");
    serve_on(listener, store, config.max_payload).await
}
