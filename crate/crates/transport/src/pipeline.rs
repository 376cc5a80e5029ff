//! Timed uploads over the network path: encryption, encoding and the HTTP
//! round trip together, one sample per send.

use std::time::Instant;

use katanpipe_core::bench::{compute_throughput, host_environment, summarize, BenchReport};
use katanpipe_core::Key80;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::client::{Client, TransportError};

pub async fn measure_pipeline(
    client: &Client,
    device_id: &str,
    key: &Key80,
    chunk_bytes: usize,
    repetitions: usize,
) -> Result<BenchReport, TransportError> {
    let mut rng = ChaCha8Rng::seed_from_u64(chunk_bytes as u64);
    let mut data = vec![0u8; chunk_bytes];
    let mut samples = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        rng.fill_bytes(&mut data);
        let start = Instant::now();
        client.send_payload(device_id, key, &data, false).await?;
        let elapsed = start.elapsed().as_secs_f64().max(1e-9);
        samples.push(compute_throughput(chunk_bytes as u64, elapsed)?);
    }
    Ok(summarize("KATAN32 pipeline", samples, host_environment())?)
}
