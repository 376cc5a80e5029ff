//! Throughput arithmetic and in-memory cipher measurement.
//!
//! Throughput is reported in bits per second: `8 * bytes / elapsed_s`, and
//! in Kb/s as `bps / 1000`. Displayed values round to two decimals, half
//! away from zero.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::registry::{BlockCipher, RegistryError};

pub const DEFAULT_REPETITIONS: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("elapsed time must be positive, got {0}")]
    NonPositiveElapsed(f64),
    #[error("no samples to summarize")]
    EmptySamples,
    #[error("target rate and chunk size must be positive")]
    NonPositiveInput,
    #[error("{total} bytes is not a positive multiple of the {block}-byte block")]
    BadLength { total: usize, block: usize },
    #[error("bad CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

impl BenchError {
    pub fn kind(&self) -> &'static str {
        match self {
            BenchError::NonPositiveElapsed(_) => "NonPositiveElapsed",
            BenchError::EmptySamples => "EmptySamples",
            BenchError::NonPositiveInput => "NonPositiveInput",
            BenchError::BadLength { .. } => "BadLength",
            BenchError::Csv(_) => "BadCsv",
            BenchError::Registry(_) => "Registry",
        }
    }
}

/// Rounds to two decimals, ties away from zero.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThroughputSample {
    pub bytes: u64,
    pub elapsed_s: f64,
    pub bits: u64,
    pub bps: f64,
    pub kbps: f64,
}

pub fn compute_throughput(bytes: u64, elapsed_s: f64) -> Result<ThroughputSample, BenchError> {
    if !(elapsed_s > 0.0) || !elapsed_s.is_finite() {
        return Err(BenchError::NonPositiveElapsed(elapsed_s));
    }
    let bits = 8 * bytes;
    let bps = bits as f64 / elapsed_s;
    Ok(ThroughputSample {
        bytes,
        elapsed_s,
        bits,
        bps,
        kbps: bps / 1000.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub cipher: String,
    pub samples: Vec<ThroughputSample>,
    /// Mean of the samples' Kb/s, rounded to two decimals.
    pub average_kbps: f64,
    pub environment: String,
}

pub fn summarize(
    cipher: impl Into<String>,
    samples: Vec<ThroughputSample>,
    environment: impl Into<String>,
) -> Result<BenchReport, BenchError> {
    if samples.is_empty() {
        return Err(BenchError::EmptySamples);
    }
    let mean = samples.iter().map(|s| s.kbps).sum::<f64>() / samples.len() as f64;
    Ok(BenchReport {
        cipher: cipher.into(),
        samples,
        average_kbps: round2(mean),
        environment: environment.into(),
    })
}

/// Free-text description of the measuring host.
pub fn host_environment() -> String {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!(
        "{}-{}, {} hardware threads (environment-dependent)",
        std::env::consts::OS,
        std::env::consts::ARCH,
        threads
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SendRate {
    pub sends_per_s: f64,
    pub interval_s: f64,
}

/// How many `chunk_bytes` sends per second saturate `target_bps`.
pub fn sends_per_second(target_bps: f64, chunk_bytes: u64) -> Result<SendRate, BenchError> {
    if !(target_bps > 0.0) || chunk_bytes == 0 {
        return Err(BenchError::NonPositiveInput);
    }
    let sends_per_s = (target_bps / 8.0) / chunk_bytes as f64;
    Ok(SendRate {
        sends_per_s,
        interval_s: 1.0 / sends_per_s,
    })
}

fn to_seconds(d: Duration) -> f64 {
    // A zero reading only means the clock tick is coarser than the work.
    d.as_secs_f64().max(1e-9)
}

/// Times `repetitions` in-memory encryptions of `total_bytes` of random data.
pub fn measure_cipher(
    cipher: &dyn BlockCipher,
    total_bytes: usize,
    key: &[u8],
    repetitions: usize,
) -> Result<BenchReport, BenchError> {
    let desc = cipher.descriptor();
    let block = desc.block_bytes();
    if total_bytes == 0 || total_bytes % block != 0 {
        return Err(BenchError::BadLength {
            total: total_bytes,
            block,
        });
    }
    if repetitions == 0 {
        return Err(BenchError::EmptySamples);
    }
    let keyed = cipher.keyed(key)?;
    let mut rng = ChaCha8Rng::seed_from_u64(total_bytes as u64);
    let mut data = vec![0u8; total_bytes];
    let mut samples = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        rng.fill_bytes(&mut data);
        let start = Instant::now();
        keyed.encrypt_blocks(std::hint::black_box(&mut data));
        let elapsed = start.elapsed();
        std::hint::black_box(&data);
        samples.push(compute_throughput(total_bytes as u64, to_seconds(elapsed))?);
    }
    summarize(desc.name, samples, host_environment())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format {other:?} (expected table or csv)")),
        }
    }
}

pub const CSV_HEADER: &str = "bytes,bits,elapsed_s,bps,kbps";

pub fn emit_report(report: &BenchReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for s in &report.samples {
                writeln!(
                    out,
                    "{},{},{},{:.2},{:.2}",
                    s.bytes,
                    s.bits,
                    s.elapsed_s,
                    round2(s.bps),
                    round2(s.kbps)
                )
                .unwrap();
            }
            writeln!(out, "average,,,,{:.2}", report.average_kbps).unwrap();
        }
        ReportFormat::Table => {
            writeln!(out, "cipher: {}", report.cipher).unwrap();
            writeln!(out, "environment: {}", report.environment).unwrap();
            writeln!(
                out,
                "{:>10} {:>12} {:>14} {:>12} {:>18} {:>18}",
                "Bytes", "Bits", "Milli-seconds", "Seconds", "Throughput (b/s)", "Throughput (Kb/s)"
            )
            .unwrap();
            for s in &report.samples {
                writeln!(
                    out,
                    "{:>10} {:>12} {:>14.3} {:>12.6} {:>18.2} {:>18.2}",
                    s.bytes,
                    s.bits,
                    s.elapsed_s * 1000.0,
                    s.elapsed_s,
                    round2(s.bps),
                    round2(s.kbps)
                )
                .unwrap();
            }
            writeln!(out, "Average throughput (Kb/s): {:.2}", report.average_kbps).unwrap();
        }
    }
    out
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn parse_field<T: FromStr>(record: &csv::StringRecord, i: usize, line: usize) -> Result<T, BenchError> {
    record
        .get(i)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| BenchError::Csv(format!("line {line}: bad or missing column {}", i + 1)))
}

/// Reads `bytes,ms` rows (with header) into samples.
pub fn parse_timing_csv(text: &str) -> Result<Vec<ThroughputSample>, BenchError> {
    let mut rdr = csv_reader(text);
    let headers = rdr.headers().map_err(|e| BenchError::Csv(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["bytes", "ms"] {
        return Err(BenchError::Csv(format!("expected header `bytes,ms`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut samples = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| BenchError::Csv(e.to_string()))?;
        let bytes: u64 = parse_field(&rec, 0, i + 2)?;
        let ms: f64 = parse_field(&rec, 1, i + 2)?;
        samples.push(compute_throughput(bytes, ms / 1000.0)?);
    }
    Ok(samples)
}

/// Reads back the CSV written by [`emit_report`]; rates are recomputed
/// from `bytes` and `elapsed_s`.
pub fn parse_report_csv(text: &str) -> Result<Vec<ThroughputSample>, BenchError> {
    let mut rdr = csv_reader(text);
    let mut samples = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| BenchError::Csv(e.to_string()))?;
        if rec.get(0) == Some("average") {
            break;
        }
        let bytes: u64 = parse_field(&rec, 0, i + 2)?;
        let bits: u64 = parse_field(&rec, 1, i + 2)?;
        let elapsed: f64 = parse_field(&rec, 2, i + 2)?;
        let s = compute_throughput(bytes, elapsed)?;
        if s.bits != bits {
            return Err(BenchError::Csv(format!("line {}: bits {bits} != 8 x bytes", i + 2)));
        }
        samples.push(s);
    }
    Ok(samples)
}
