//! Bytes to lane-words and back, 256-byte chunking with zero padding, and
//! whole-payload encryption.
//!
//! Every 8 bytes become one 64-bit word, least significant byte first, and
//! 32 words make one [`BitslicedBatch`] that goes straight into the
//! bitsliced cipher. Chunks are encrypted independently with no chaining,
//! so equal 256-byte chunks under one key give equal ciphertext.

use thiserror::Error;

use crate::katan::{self, BitslicedBatch, Key80, BATCH_BYTES, BLOCK_BITS};

pub const CHUNK_BYTES: usize = BATCH_BYTES;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("input is empty")]
    EmptyInput,
    #[error("input of {0} bytes exceeds the {CHUNK_BYTES}-byte chunk")]
    Oversize(usize),
    #[error("used length {0} outside 1..={CHUNK_BYTES}")]
    LengthOutOfRange(usize),
    #[error("ciphertext length {0} is not a positive multiple of {CHUNK_BYTES}")]
    BadCiphertextLength(usize),
    #[error("plaintext_len {plaintext_len} does not fit a {ciphertext_len}-byte ciphertext")]
    BadPlaintextLen {
        plaintext_len: u64,
        ciphertext_len: usize,
    },
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("missing field {0:?}")]
    MissingField(&'static str),
    #[error("bad base64 payload: {0}")]
    BadBase64(String),
    #[error("plaintext_len {plaintext_len} inconsistent with {payload_len}-byte payload")]
    BadLengthInvariant { plaintext_len: u64, payload_len: usize },
    #[error("unknown cipher {0:?}")]
    UnknownCipher(String),
}

impl CodecError {
    /// The variant name, used as the machine-readable rejection reason.
    pub fn kind(&self) -> &'static str {
        match self {
            CodecError::EmptyInput => "EmptyInput",
            CodecError::Oversize(_) => "Oversize",
            CodecError::LengthOutOfRange(_) => "LengthOutOfRange",
            CodecError::BadCiphertextLength(_) => "BadCiphertextLength",
            CodecError::BadPlaintextLen { .. } => "BadPlaintextLen",
            CodecError::MalformedJson(_) => "MalformedJson",
            CodecError::MissingField(_) => "MissingField",
            CodecError::BadBase64(_) => "BadBase64",
            CodecError::BadLengthInvariant { .. } => "BadLengthInvariant",
            CodecError::UnknownCipher(_) => "UnknownCipher",
        }
    }
}

/// Packs up to 256 bytes into 32 words, zero-padding the tail.
pub fn pack_bytes(data: &[u8]) -> Result<BitslicedBatch, CodecError> {
    if data.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    if data.len() > CHUNK_BYTES {
        return Err(CodecError::Oversize(data.len()));
    }
    let mut padded = [0u8; CHUNK_BYTES];
    padded[..data.len()].copy_from_slice(data);
    let mut words = [0u64; BLOCK_BITS];
    for (w, bytes) in words.iter_mut().zip(padded.chunks_exact(8)) {
        *w = u64::from_le_bytes(bytes.try_into().unwrap());
    }
    Ok(BitslicedBatch::new(words))
}

pub fn unpack_words(batch: &BitslicedBatch, used_len: usize) -> Result<Vec<u8>, CodecError> {
    if used_len == 0 || used_len > CHUNK_BYTES {
        return Err(CodecError::LengthOutOfRange(used_len));
    }
    let mut out: Vec<u8> = batch.words.iter().flat_map(|w| w.to_le_bytes()).collect();
    out.truncate(used_len);
    Ok(out)
}

/// One zero-padded 256-byte slice of input.
#[derive(Clone, PartialEq, Eq)]
pub struct Chunk {
    bytes: [u8; CHUNK_BYTES],
    used_len: usize,
}

impl Chunk {
    pub fn bytes(&self) -> &[u8; CHUNK_BYTES] {
        &self.bytes
    }

    pub fn used_len(&self) -> usize {
        self.used_len
    }

    pub fn data(&self) -> &[u8] {
        &self.bytes[..self.used_len]
    }
}

impl std::fmt::Debug for Chunk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chunk").field("used_len", &self.used_len).finish_non_exhaustive()
    }
}

pub fn chunk_stream(data: &[u8]) -> Result<Vec<Chunk>, CodecError> {
    if data.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    Ok(data
        .chunks(CHUNK_BYTES)
        .map(|part| {
            let mut bytes = [0u8; CHUNK_BYTES];
            bytes[..part.len()].copy_from_slice(part);
            Chunk {
                bytes,
                used_len: part.len(),
            }
        })
        .collect())
}

/// Encrypts `data` chunk by chunk. Returns the ciphertext (256 bytes per
/// chunk) and the original length needed to strip the padding.
pub fn encrypt_payload(data: &[u8], key: &Key80) -> Result<(Vec<u8>, usize), CodecError> {
    let sliced = katan::broadcast_key(key);
    let chunks = chunk_stream(data)?;
    let mut out = Vec::with_capacity(chunks.len() * CHUNK_BYTES);
    for chunk in &chunks {
        let batch = pack_bytes(chunk.bytes())?;
        let sealed = katan::encrypt_batch(&batch, &sliced);
        out.extend(unpack_words(&sealed, CHUNK_BYTES)?);
    }
    Ok((out, data.len()))
}

/// Checks that `plaintext_len` lands inside the final chunk.
pub fn check_lengths(ciphertext_len: usize, plaintext_len: u64) -> Result<(), CodecError> {
    if ciphertext_len == 0 || ciphertext_len % CHUNK_BYTES != 0 {
        return Err(CodecError::BadCiphertextLength(ciphertext_len));
    }
    let total = ciphertext_len as u64;
    if plaintext_len > total || plaintext_len + CHUNK_BYTES as u64 <= total {
        return Err(CodecError::BadPlaintextLen {
            plaintext_len,
            ciphertext_len,
        });
    }
    Ok(())
}

pub fn decrypt_payload(ciphertext: &[u8], plaintext_len: u64, key: &Key80) -> Result<Vec<u8>, CodecError> {
    check_lengths(ciphertext.len(), plaintext_len)?;
    let sliced = katan::broadcast_key(key);
    let mut out = Vec::with_capacity(ciphertext.len());
    for chunk in ciphertext.chunks_exact(CHUNK_BYTES) {
        let batch = pack_bytes(chunk)?;
        out.extend(unpack_words(&katan::decrypt_batch(&batch, &sliced), CHUNK_BYTES)?);
    }
    out.truncate(plaintext_len as usize);
    Ok(out)
}
