//! Networked half of the pipeline: an ingest server that stores only
//! ciphertext, and the uploader that encrypts, encodes and POSTs it.

pub mod client;
pub mod pipeline;
pub mod server;
pub mod store;

pub use client::{send_payload, Ack, Client, RetryPolicy, SendOptions, TransportError};
pub use pipeline::measure_pipeline;
pub use server::{ingest, router, serve, serve_on, IngestResult, IngestStatus, ServerConfig, DEFAULT_MAX_PAYLOAD};
pub use store::{BlobStore, MetaRecord, StoreError};
