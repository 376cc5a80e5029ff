//! `katanpipe`: keys, file encryption, the ingest server, the uploader and
//! the benchmark harness.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error. Every failure
//! prints a single `error:` line on stderr first.

mod failure;

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};
use katanpipe_core::bench::{self, emit_report, ReportFormat, DEFAULT_REPETITIONS};
use katanpipe_core::codec::{decrypt_payload, encrypt_payload, CodecError};
use katanpipe_core::{default_registry, parse_key, Key80};
use katanpipe_transport::store::parse_meta;
use katanpipe_transport::{serve_on, BlobStore, Client, DEFAULT_MAX_PAYLOAD};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "katanpipe", version, about = "KATAN32 encrypted telemetry pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a fresh 80-bit key as 20 hex characters.
    Keygen {
        #[arg(long)]
        out: PathBuf,
        /// Derive the key from a seed (reproducible; tests only).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a file into concatenated 256-byte ciphertext chunks.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext file, trimming padding by length or metadata.
    Decrypt(DecryptArgs),
    /// Run the ingest server.
    Serve {
        #[arg(long, env = "KATANPIPE_ADDR", default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long, env = "KATANPIPE_DATA")]
        data: PathBuf,
        #[arg(long, env = "KATANPIPE_MAX_PAYLOAD", default_value_t = DEFAULT_MAX_PAYLOAD)]
        max_payload: usize,
    },
    /// Encrypt a file and upload it to an ingest server.
    Send {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        server: String,
        #[arg(long)]
        device: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// One envelope per 256-byte chunk.
        #[arg(long)]
        per_chunk: bool,
    },
    /// Download a device's stored ciphertext (and optionally its metadata).
    Fetch {
        #[arg(long)]
        server: String,
        #[arg(long)]
        device: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        meta_out: Option<PathBuf>,
    },
    /// Throughput measurements and arithmetic.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(ArgGroup::new("length").required(true).args(["len", "meta"])))]
struct DecryptArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    /// Plaintext length in bytes.
    #[arg(long)]
    len: Option<u64>,
    /// Metadata fetched alongside the blob.
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// In-memory encryption throughput of a registered cipher.
    Cipher {
        #[arg(long)]
        cipher: String,
        #[arg(long, default_value_t = 65_536)]
        bytes: usize,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        reps: usize,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Timed uploads against a running server.
    Pipeline {
        #[arg(long)]
        server: String,
        #[arg(long)]
        device: String,
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = 250)]
        chunk: usize,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        reps: usize,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Recompute throughput from recorded `bytes,ms` rows.
    Table5 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Sends per second needed to reach a target bit rate.
    Rate {
        #[arg(long)]
        target_bps: f64,
        #[arg(long)]
        chunk: u64,
    },
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(path, "read", e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(path, "write", e))
}

fn read_key(path: &Path) -> Result<Key80, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, "read key", e))?;
    Ok(parse_key(&text)?)
}

fn runtime() -> Result<tokio::runtime::Runtime, Failure> {
    tokio::runtime::Runtime::new().map_err(|e| Failure::new("Io", format!("cannot start runtime: {e}")))
}

fn decrypt(args: &DecryptArgs) -> Result<(), Failure> {
    let key = read_key(&args.key)?;
    let ciphertext = read(&args.input)?;
    let plaintext = match (&args.len, &args.meta) {
        (Some(len), None) => decrypt_payload(&ciphertext, *len, &key)?,
        (None, Some(meta_path)) => {
            let text = fs::read_to_string(meta_path).map_err(|e| Failure::io(meta_path, "read", e))?;
            let records = parse_meta(&text)?;
            let end = records.last().map_or(0, |r| r.end());
            if end != ciphertext.len() as u64 {
                return Err(CodecError::BadCiphertextLength(ciphertext.len()).into());
            }
            let mut out = Vec::with_capacity(ciphertext.len());
            for r in &records {
                let seg = &ciphertext[r.offset as usize..r.end() as usize];
                out.extend(decrypt_payload(seg, r.plaintext_len, &key)?);
            }
            out
        }
        _ => unreachable!("clap enforces exactly one of --len/--meta"),
    };
    write(&args.out, &plaintext)
}

fn bench(cmd: BenchCommand) -> Result<(), Failure> {
    match cmd {
        BenchCommand::Cipher {
            cipher,
            bytes,
            reps,
            format,
        } => {
            let c = default_registry().lookup(&cipher)?;
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut key = vec![0u8; c.descriptor().key_bytes()];
            rng.fill_bytes(&mut key);
            let report = bench::measure_cipher(c, bytes, &key, reps)?;
            print!("{}", emit_report(&report, format));
            if format == ReportFormat::Table {
                if let Some(size) = std::env::current_exe().ok().and_then(|p| fs::metadata(p).ok()) {
                    println!("Code size (bytes, this executable, environment-dependent): {}", size.len());
                }
            }
        }
        BenchCommand::Pipeline {
            server,
            device,
            key,
            chunk,
            reps,
            format,
        } => {
            let key = read_key(&key)?;
            let client = Client::new(&server);
            let report =
                runtime()?.block_on(katanpipe_transport::measure_pipeline(&client, &device, &key, chunk, reps))?;
            print!("{}", emit_report(&report, format));
        }
        BenchCommand::Table5 { input, format } => {
            let text = fs::read_to_string(&input).map_err(|e| Failure::io(&input, "read", e))?;
            let samples = bench::parse_timing_csv(&text)?;
            let report = bench::summarize("KATAN32", samples, "replayed timings")?;
            print!("{}", emit_report(&report, format));
        }
        BenchCommand::Rate { target_bps, chunk } => {
            let r = bench::sends_per_second(target_bps, chunk)?;
            println!("sends_per_second: {}", r.sends_per_s);
            println!("interval_s: {}", r.interval_s);
            println!("interval_us: {}", r.interval_s * 1e6);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Keygen { out, seed } => {
            let bytes: [u8; 10] = match seed {
                Some(s) => ChaCha8Rng::seed_from_u64(s).random(),
                None => rand::rng().random(),
            };
            write(&out, format!("{}\n", Key80::from_bytes(bytes)).as_bytes())?;
        }
        Command::Encrypt { key, input, out } => {
            let key = read_key(&key)?;
            let (ciphertext, len) = encrypt_payload(&read(&input)?, &key)?;
            write(&out, &ciphertext)?;
            println!("plaintext_len {len}");
        }
        Command::Decrypt(args) => decrypt(&args)?,
        Command::Serve {
            addr,
            data,
            max_payload,
        } => {
            tracing_subscriber::fmt().with_writer(std::io::stderr).init();
            let store = Arc::new(BlobStore::open(&data).map_err(|e| Failure::io(&data, "open data dir", e))?);
            runtime()?.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr)
                    .await
                    .map_err(|e| Failure::new("Io", format!("cannot bind {addr}: {e}")))?;
                let local = listener.local_addr().map_err(|e| Failure::new("Io", e.to_string()))?;
                println!("listening on http://{local}");
                std::io::stdout().flush().ok();
                serve_on(listener, store, max_payload)
                    .await
                    .map_err(|e| Failure::new("Io", format!("server stopped: {e}")))
            })?;
        }
        Command::Send {
            key,
            server,
            device,
            input,
            per_chunk,
        } => {
            let key = read_key(&key)?;
            let data = read(&input)?;
            let client = Client::new(&server);
            let acks = runtime()?.block_on(client.send_payload(&device, &key, &data, per_chunk))?;
            for a in acks {
                println!("seq {} stored {}", a.seq, a.stored);
            }
        }
        Command::Fetch {
            server,
            device,
            out,
            meta_out,
        } => {
            let client = Client::new(&server);
            let rt = runtime()?;
            let blob = rt.block_on(client.fetch_blob(&device))?;
            write(&out, &blob)?;
            if let Some(path) = meta_out {
                let text = rt.block_on(client.fetch_meta_text(&device))?;
                write(&path, text.as_bytes())?;
            }
            println!("fetched {} bytes", blob.len());
        }
        Command::Bench(cmd) => bench(cmd)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(2)
        }
    }
}
