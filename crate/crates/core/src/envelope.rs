//! The JSON wire record:
//!
//! ```json
//! {"device_id":"...","seq":0,"ts_ms":0,"cipher":"KATAN32","plaintext_len":250,"payload":"<base64>"}
//! ```
//!
//! `payload` is standard Base64 (RFC 4648 alphabet, `=` padding, no line
//! breaks) of whole 256-byte ciphertext chunks; `plaintext_len` says how
//! much of the last chunk is real data.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::codec::{check_lengths, CodecError};
use crate::registry::default_registry;

pub const DEFAULT_CIPHER: &str = "KATAN32";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub device_id: String,
    pub seq: u64,
    pub ts_ms: u64,
    pub cipher: String,
    pub plaintext_len: u64,
    pub payload: String,
}

/// Everything in an envelope except the payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopeMeta {
    pub device_id: String,
    pub seq: u64,
    pub ts_ms: u64,
    pub cipher: String,
    pub plaintext_len: u64,
}

impl EnvelopeMeta {
    pub fn new(device_id: impl Into<String>, seq: u64, ts_ms: u64, plaintext_len: u64) -> Self {
        EnvelopeMeta {
            device_id: device_id.into(),
            seq,
            ts_ms,
            cipher: DEFAULT_CIPHER.to_string(),
            plaintext_len,
        }
    }
}

pub fn encode_envelope(ciphertext: &[u8], meta: &EnvelopeMeta) -> Result<String, CodecError> {
    check_lengths(ciphertext.len(), meta.plaintext_len)?;
    let env = Envelope {
        device_id: meta.device_id.clone(),
        seq: meta.seq,
        ts_ms: meta.ts_ms,
        cipher: meta.cipher.clone(),
        plaintext_len: meta.plaintext_len,
        payload: STANDARD.encode(ciphertext),
    };
    Ok(serde_json::to_string(&env).expect("envelope serializes"))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &'static str) -> Result<&'a Value, CodecError> {
    obj.get(name).ok_or(CodecError::MissingField(name))
}

fn str_field(obj: &Map<String, Value>, name: &'static str) -> Result<String, CodecError> {
    field(obj, name)?
        .as_str()
        .map(str::to_owned)
        .ok_or_else(|| CodecError::MalformedJson(format!("field {name:?} must be a string")))
}

fn u64_field(obj: &Map<String, Value>, name: &'static str) -> Result<u64, CodecError> {
    field(obj, name)?
        .as_u64()
        .ok_or_else(|| CodecError::MalformedJson(format!("field {name:?} must be a non-negative integer")))
}

/// Parses and validates an envelope, returning the raw ciphertext.
pub fn decode_envelope(text: &str) -> Result<(Vec<u8>, EnvelopeMeta), CodecError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CodecError::MalformedJson(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CodecError::MalformedJson("envelope must be a JSON object".into()))?;

    let meta = EnvelopeMeta {
        device_id: str_field(obj, "device_id")?,
        seq: u64_field(obj, "seq")?,
        ts_ms: u64_field(obj, "ts_ms")?,
        cipher: str_field(obj, "cipher")?,
        plaintext_len: u64_field(obj, "plaintext_len")?,
    };
    let payload = str_field(obj, "payload")?;

    if default_registry().get(&meta.cipher).is_none() {
        return Err(CodecError::UnknownCipher(meta.cipher));
    }
    let ciphertext = STANDARD
        .decode(payload.as_bytes())
        .map_err(|e| CodecError::BadBase64(e.to_string()))?;
    check_lengths(ciphertext.len(), meta.plaintext_len).map_err(|_| CodecError::BadLengthInvariant {
        plaintext_len: meta.plaintext_len,
        payload_len: ciphertext.len(),
    })?;
    Ok((ciphertext, meta))
}
