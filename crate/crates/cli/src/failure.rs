use std::fmt;
use std::io;
use std::path::Path;

use katanpipe_core::bench::BenchError;
use katanpipe_core::katan::KatanError;
use katanpipe_core::registry::RegistryError;
use katanpipe_core::CodecError;
use katanpipe_transport::{StoreError, TransportError};

/// A runtime failure; printed as `error: <Kind>: <message>`.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, action: &str, e: io::Error) -> Self {
        Failure::new("Io", format!("cannot {action} {}: {e}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

macro_rules! from_kinded {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::new(e.kind(), e.to_string())
            }
        }
    )*};
}

from_kinded!(CodecError, KatanError, BenchError, TransportError, StoreError);

impl From<RegistryError> for Failure {
    fn from(e: RegistryError) -> Self {
        let kind = match e {
            RegistryError::UnknownCipher(_) => "UnknownCipher",
            _ => "Registry",
        };
        Failure::new(kind, e.to_string())
    }
}
