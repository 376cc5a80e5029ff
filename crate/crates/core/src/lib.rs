//! Encrypted telemetry pipeline primitives.
//!
//! - [`katan`]: KATAN32 in scalar and 64-lane bitsliced form.
//! - [`present`]: PRESENT-80, used as a comparison baseline.
//! - [`registry`]: block ciphers behind one trait, looked up by name.
//! - [`codec`] / [`envelope`]: bytes to lane-words, 256-byte zero-padded
//!   chunks, whole-payload encryption and the JSON wire record.
//! - [`bench`]: throughput arithmetic, measurement and reports.

pub mod bench;
pub mod codec;
pub mod envelope;
pub mod katan;
pub mod present;
pub mod registry;

pub use codec::{decrypt_payload, encrypt_payload, CodecError};
pub use envelope::{decode_envelope, encode_envelope, Envelope, EnvelopeMeta};
pub use katan::{parse_key, Key80};
pub use registry::{default_registry, list_ciphers, BlockCipher, CipherDescriptor, KeyedCipher, Registry};
