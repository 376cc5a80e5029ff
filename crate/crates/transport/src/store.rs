//! Append-only per-device ciphertext storage.
//!
//! Each device gets `<id>.bin` (raw ciphertext, concatenated in arrival
//! order) and `<id>.meta` (one `seq ts_ms plaintext_len offset length` line
//! per accepted envelope). Nothing here can decrypt.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use katanpipe_core::EnvelopeMeta;
use thiserror::Error;

const MAX_DEVICE_ID_LEN: usize = 128;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid device id {0:?}")]
    InvalidDeviceId(String),
    #[error("unknown device {0:?}")]
    UnknownDevice(String),
    #[error("corrupt metadata: {0}")]
    CorruptMeta(String),
    #[error("storage I/O: {0}")]
    Io(#[from] io::Error),
}

impl StoreError {
    pub fn kind(&self) -> &'static str {
        match self {
            StoreError::InvalidDeviceId(_) => "InvalidDeviceId",
            StoreError::UnknownDevice(_) => "UnknownDevice",
            StoreError::CorruptMeta(_) => "CorruptMeta",
            StoreError::Io(_) => "StorageFailure",
        }
    }
}

/// Device ids become file names: 1..=128 of `[A-Za-z0-9_.-]`, not starting
/// with a dot.
pub fn validate_device_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && id.len() <= MAX_DEVICE_ID_LEN
        && !id.starts_with('.')
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidDeviceId(id.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetaRecord {
    pub seq: u64,
    pub ts_ms: u64,
    pub plaintext_len: u64,
    pub offset: u64,
    pub length: u64,
}

impl MetaRecord {
    pub fn end(&self) -> u64 {
        self.offset + self.length
    }
}

impl fmt::Display for MetaRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.seq, self.ts_ms, self.plaintext_len, self.offset, self.length
        )
    }
}

impl FromStr for MetaRecord {
    type Err = StoreError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let fields: Vec<u64> = line
            .split_whitespace()
            .map(|f| f.parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| StoreError::CorruptMeta(format!("{line:?}: {e}")))?;
        match fields[..] {
            [seq, ts_ms, plaintext_len, offset, length] => Ok(MetaRecord {
                seq,
                ts_ms,
                plaintext_len,
                offset,
                length,
            }),
            _ => Err(StoreError::CorruptMeta(format!("{line:?}: expected 5 fields"))),
        }
    }
}

/// Parses `.meta` text and checks that offsets are contiguous from zero.
pub fn parse_meta(text: &str) -> Result<Vec<MetaRecord>, StoreError> {
    let records: Vec<MetaRecord> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    let mut expected = 0;
    for r in &records {
        if r.offset != expected {
            return Err(StoreError::CorruptMeta(format!(
                "record seq {} starts at {} but previous data ends at {expected}",
                r.seq, r.offset
            )));
        }
        expected = r.end();
    }
    Ok(records)
}

#[derive(Default)]
struct DeviceState {
    /// End of the last committed record; `None` until first loaded.
    end: Option<u64>,
}

pub struct BlobStore {
    root: PathBuf,
    devices: Mutex<HashMap<String, Arc<Mutex<DeviceState>>>>,
}

impl BlobStore {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(BlobStore {
            root,
            devices: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn bin_path(&self, id: &str) -> PathBuf {
        self.root.join(format!("{id}.bin"))
    }

    fn meta_path(&self, id: &str) -> PathBuf {
        self.root.join(format!("{id}.meta"))
    }

    fn device(&self, id: &str) -> Arc<Mutex<DeviceState>> {
        let mut map = self.devices.lock().expect("device map poisoned");
        map.entry(id.to_string()).or_default().clone()
    }

    /// Appends one envelope's ciphertext and its metadata line. Both files
    /// are synced before this returns.
    pub fn append(&self, meta: &EnvelopeMeta, ciphertext: &[u8]) -> Result<MetaRecord, StoreError> {
        validate_device_id(&meta.device_id)?;
        let device = self.device(&meta.device_id);
        let mut state = device.lock().expect("device lock poisoned");

        let end = match state.end {
            Some(end) => end,
            None => match fs::read_to_string(self.meta_path(&meta.device_id)) {
                Ok(text) => parse_meta(&text)?.last().map_or(0, MetaRecord::end),
                Err(e) if e.kind() == io::ErrorKind::NotFound => 0,
                Err(e) => return Err(e.into()),
            },
        };

        let mut bin = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(false)
            .open(self.bin_path(&meta.device_id))?;
        // Drop bytes left behind by an append whose metadata never landed.
        bin.set_len(end)?;
        write_at_end(&mut bin, ciphertext)?;

        let record = MetaRecord {
            seq: meta.seq,
            ts_ms: meta.ts_ms,
            plaintext_len: meta.plaintext_len,
            offset: end,
            length: ciphertext.len() as u64,
        };
        let mut meta_file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.meta_path(&meta.device_id))?;
        meta_file.write_all(format!("{record}\n").as_bytes())?;
        meta_file.sync_data()?;

        state.end = Some(record.end());
        Ok(record)
    }

    pub fn read_blob(&self, device_id: &str) -> Result<Vec<u8>, StoreError> {
        validate_device_id(device_id)?;
        let records = self.read_meta(device_id)?;
        let device = self.device(device_id);
        let _guard = device.lock().expect("device lock poisoned");
        let mut blob = fs::read(self.bin_path(device_id))?;
        blob.truncate(records.last().map_or(0, MetaRecord::end) as usize);
        Ok(blob)
    }

    pub fn read_meta(&self, device_id: &str) -> Result<Vec<MetaRecord>, StoreError> {
        validate_device_id(device_id)?;
        let device = self.device(device_id);
        let _guard = device.lock().expect("device lock poisoned");
        let text = match fs::read_to_string(self.meta_path(device_id)) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::UnknownDevice(device_id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let records = parse_meta(&text)?;
        if records.is_empty() {
            return Err(StoreError::UnknownDevice(device_id.to_string()));
        }
        Ok(records)
    }
}

fn write_at_end(file: &mut File, data: &[u8]) -> io::Result<()> {
    use std::io::{Seek, SeekFrom};
    file.seek(SeekFrom::End(0))?;
    file.write_all(data)?;
    file.sync_data()
}
