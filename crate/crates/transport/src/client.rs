//! Device-side uploader and download helpers.

use std::time::{Duration, SystemTime, UNIX_EPOCH};

use katanpipe_core::bench::BenchError;
use katanpipe_core::codec::{chunk_stream, encrypt_payload, CodecError};
use katanpipe_core::{encode_envelope, EnvelopeMeta, Key80};
use thiserror::Error;

use crate::server::{IngestResult, IngestStatus};
use crate::store::{parse_meta, MetaRecord, StoreError};

#[derive(Debug, Error)]
pub enum TransportError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("connection to {url} failed after {attempts} attempt(s): {message}")]
    ConnectionFailed {
        url: String,
        attempts: u32,
        message: String,
    },
    #[error("server rejected request with HTTP {status}: {reason}")]
    ServerRejected { status: u16, reason: String },
    #[error("unknown device {0:?}")]
    UnknownDevice(String),
    #[error("unexpected response: {0}")]
    BadResponse(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

impl TransportError {
    pub fn kind(&self) -> &'static str {
        match self {
            TransportError::Codec(e) => e.kind(),
            TransportError::ConnectionFailed { .. } => "ConnectionFailed",
            TransportError::ServerRejected { .. } => "ServerRejected",
            TransportError::UnknownDevice(_) => "UnknownDevice",
            TransportError::BadResponse(_) => "BadResponse",
            TransportError::Bench(e) => e.kind(),
        }
    }
}

impl From<StoreError> for TransportError {
    fn from(e: StoreError) -> Self {
        TransportError::BadResponse(e.to_string())
    }
}

/// Bounded retry for connection-level failures. HTTP error statuses are
/// never retried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            initial_backoff: Duration::from_millis(250),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `n` (1-based): doubles each time.
    pub fn backoff(&self, n: u32) -> Duration {
        self.initial_backoff * 2u32.saturating_pow(n.saturating_sub(1))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SendOptions {
    /// One envelope per 256-byte chunk instead of one per payload.
    pub per_chunk: bool,
    pub retry: RetryPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ack {
    pub seq: u64,
    pub stored: u64,
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct Client {
    http: reqwest::Client,
    base: String,
    retry: RetryPolicy,
}

impl Client {
    pub fn new(server_url: &str) -> Self {
        Self::with_retry(server_url, RetryPolicy::default())
    }

    pub fn with_retry(server_url: &str, retry: RetryPolicy) -> Self {
        Client {
            http: reqwest::Client::new(),
            base: server_url.trim_end_matches('/').to_string(),
            retry,
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    async fn with_retries<F, Fut>(&self, url: &str, mut op: F) -> Result<reqwest::Response, TransportError>
    where
        F: FnMut() -> Fut,
        Fut: std::future::Future<Output = Result<reqwest::Response, reqwest::Error>>,
    {
        let attempts = self.retry.attempts.max(1);
        let mut last = String::new();
        for n in 1..=attempts {
            match op().await {
                Ok(resp) => return Ok(resp),
                Err(e) => {
                    tracing::debug!(attempt = n, error = %e, "request failed");
                    last = e.to_string();
                    if n < attempts {
                        tokio::time::sleep(self.retry.backoff(n)).await;
                    }
                }
            }
        }
        Err(TransportError::ConnectionFailed {
            url: url.to_string(),
            attempts,
            message: last,
        })
    }

    async fn post_envelope(&self, body: String) -> Result<IngestResult, TransportError> {
        let url = self.url("/api/v1/ingest");
        let resp = self
            .with_retries(&url, || {
                self.http
                    .post(&url)
                    .header("content-type", "application/json")
                    .body(body.clone())
                    .send()
            })
            .await?;
        let status = resp.status();
        let text = resp.text().await.map_err(|e| TransportError::BadResponse(e.to_string()))?;
        let parsed: Option<IngestResult> = serde_json::from_str(&text).ok();
        match parsed {
            Some(r) if status.is_success() && r.status == IngestStatus::Ok => Ok(r),
            Some(r) => Err(TransportError::ServerRejected {
                status: status.as_u16(),
                reason: r.reason.unwrap_or_default(),
            }),
            None => Err(TransportError::ServerRejected {
                status: status.as_u16(),
                reason: text.trim().to_string(),
            }),
        }
    }

    /// Encrypts `data` and uploads it. Sequence numbers start at 0.
    pub async fn send_payload(
        &self,
        device_id: &str,
        key: &Key80,
        data: &[u8],
        per_chunk: bool,
    ) -> Result<Vec<Ack>, TransportError> {
        let units: Vec<Vec<u8>> = if per_chunk {
            chunk_stream(data)?.iter().map(|c| c.data().to_vec()).collect()
        } else {
            if data.is_empty() {
                return Err(CodecError::EmptyInput.into());
            }
            vec![data.to_vec()]
        };
        let mut acks = Vec::with_capacity(units.len());
        for (seq, unit) in units.iter().enumerate() {
            let (ciphertext, len) = encrypt_payload(unit, key)?;
            let meta = EnvelopeMeta::new(device_id, seq as u64, now_ms(), len as u64);
            let body = encode_envelope(&ciphertext, &meta)?;
            let r = self.post_envelope(body).await?;
            acks.push(Ack {
                seq: seq as u64,
                stored: r.stored_bytes,
            });
        }
        Ok(acks)
    }

    async fn get_device(&self, device_id: &str, what: &str) -> Result<reqwest::Response, TransportError> {
        let url = self.url(&format!("/api/v1/devices/{device_id}/{what}"));
        let resp = self.with_retries(&url, || self.http.get(&url).send()).await?;
        match resp.status().as_u16() {
            200 => Ok(resp),
            404 => Err(TransportError::UnknownDevice(device_id.to_string())),
            status => Err(TransportError::ServerRejected {
                status,
                reason: resp.text().await.unwrap_or_default().trim().to_string(),
            }),
        }
    }

    pub async fn fetch_blob(&self, device_id: &str) -> Result<Vec<u8>, TransportError> {
        let resp = self.get_device(device_id, "blob").await?;
        let bytes = resp.bytes().await.map_err(|e| TransportError::BadResponse(e.to_string()))?;
        Ok(bytes.to_vec())
    }

    /// Raw `.meta` text as served.
    pub async fn fetch_meta_text(&self, device_id: &str) -> Result<String, TransportError> {
        let resp = self.get_device(device_id, "meta").await?;
        resp.text().await.map_err(|e| TransportError::BadResponse(e.to_string()))
    }

    pub async fn fetch_meta(&self, device_id: &str) -> Result<Vec<MetaRecord>, TransportError> {
        Ok(parse_meta(&self.fetch_meta_text(device_id).await?)?)
    }

    pub async fn health(&self) -> Result<bool, TransportError> {
        let url = self.url("/health");
        let resp = self.with_retries(&url, || self.http.get(&url).send()).await?;
        Ok(resp.status().is_success())
    }
}

/// One-shot form of [`Client::send_payload`].
pub async fn send_payload(
    server_url: &str,
    device_id: &str,
    key: &Key80,
    data: &[u8],
    options: SendOptions,
) -> Result<Vec<Ack>, TransportError> {
    Client::with_retry(server_url, options.retry)
        .send_payload(device_id, key, data, options.per_chunk)
        .await
}
