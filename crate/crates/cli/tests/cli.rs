use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use katanpipe_core::parse_key;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn katanpipe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_katanpipe"))
        .args(args)
        .output()
        .expect("run katanpipe")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn keygen_encrypt_decrypt_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let (key, pt, ct, back) = (
        dir.path().join("k"),
        dir.path().join("pt"),
        dir.path().join("ct"),
        dir.path().join("back"),
    );
    let mut data = vec![0u8; 1000];
    ChaCha8Rng::seed_from_u64(3).fill_bytes(&mut data);
    fs::write(&pt, &data).unwrap();

    assert!(katanpipe(&["keygen", "--out", p(&key)]).status.success());
    parse_key(&fs::read_to_string(&key).unwrap()).unwrap();

    let out = katanpipe(&["encrypt", "--key", p(&key), "--in", p(&pt), "--out", p(&ct)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "plaintext_len 1000");
    assert_eq!(fs::metadata(&ct).unwrap().len(), 1024);

    let out = katanpipe(&["decrypt", "--key", p(&key), "--in", p(&ct), "--len", "1000", "--out", p(&back)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read(&back).unwrap(), data);
}

#[test]
fn seeded_keygen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    katanpipe(&["keygen", "--out", p(&a), "--seed", "42"]);
    katanpipe(&["keygen", "--out", p(&b), "--seed", "42"]);
    katanpipe(&["keygen", "--out", p(&c), "--seed", "43"]);
    let a = fs::read_to_string(a).unwrap();
    assert_eq!(a, fs::read_to_string(b).unwrap());
    assert_ne!(a, fs::read_to_string(c).unwrap());
    assert_eq!(a.len(), 21);
    assert!(a.ends_with('\n'));
}

#[test]
fn truncated_ciphertext_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let (key, ct) = (dir.path().join("k"), dir.path().join("ct"));
    fs::write(&key, "00112233445566778899\n").unwrap();
    fs::write(&ct, [0u8; 300]).unwrap();
    let out = katanpipe(&["decrypt", "--key", p(&key), "--in", p(&ct), "--len", "250", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: BadCiphertextLength:"), "{err}");
}

#[test]
fn malformed_key_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let (key, pt) = (dir.path().join("k"), dir.path().join("pt"));
    fs::write(&key, "not-a-key").unwrap();
    fs::write(&pt, b"hello").unwrap();
    let out = katanpipe(&["encrypt", "--key", p(&key), "--in", p(&pt), "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: MalformedKey:"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(katanpipe(&["bogus"]).status.code(), Some(1));
    assert_eq!(katanpipe(&["decrypt", "--key", "k", "--in", "c", "--out", "o"]).status.code(), Some(1));
    assert_eq!(
        katanpipe(&["decrypt", "--key", "k", "--in", "c", "--len", "1", "--meta", "m", "--out", "o"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(katanpipe(&["--help"]).status.code(), Some(0));
}

#[test]
fn bench_table5_replay() {
    let csv = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/table5.csv");
    let out = katanpipe(&["bench", "table5", "--in", p(&csv)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("19047.62"));
    assert!(text.trim_end().ends_with("11.12"), "{text}");

    let out = katanpipe(&["bench", "table5", "--in", p(&csv), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("bytes,bits,elapsed_s,bps,kbps\n"));
    assert_eq!(text.lines().last(), Some("average,,,,11.12"));
}

#[test]
fn bench_rate() {
    let out = katanpipe(&["bench", "rate", "--target-bps", "1000000000", "--chunk", "250"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("sends_per_second: 500000\n"), "{text}");
    assert!(text.contains("interval_s: 0.000002\n"), "{text}");
}

#[test]
fn bench_cipher_rejects_unknown_name() {
    let out = katanpipe(&["bench", "cipher", "--cipher", "DES"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: UnknownCipher:"));
}

#[test]
fn bench_cipher_lists_environment() {
    for name in ["KATAN32", "present", "AES-128"] {
        let out = katanpipe(&["bench", "cipher", "--cipher", name, "--bytes", "4096", "--reps", "2"]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("environment-dependent"));
        assert!(text.contains("Average throughput"));
    }
}
