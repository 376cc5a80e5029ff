//! Builds and drives the C KATAN32 reference in `tests/oracle/`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

pub struct KatanOracle {
    exe: PathBuf,
    _dir: tempfile::TempDir,
}

pub fn oracle_source() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/oracle/katan32_ref.c")
}

impl KatanOracle {
    /// Compiles the reference with `$CC` (default `cc`).
    pub fn build() -> Result<Self, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let exe = dir.path().join("katan32_ref");
        let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
        let out = Command::new(&cc)
            .args(["-O2", "-o"])
            .arg(&exe)
            .arg(oracle_source())
            .output()
            .map_err(|e| format!("cannot run C compiler {cc:?}: {e}"))?;
        if !out.status.success() {
            return Err(format!("oracle build failed: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(KatanOracle { exe, _dir: dir })
    }

    /// For each `(key_hex, block)` returns `(E_k(block), D_k(block))`.
    pub fn run(&self, cases: &[(String, u32)]) -> Vec<(u32, u32)> {
        let mut child = Command::new(&self.exe)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .expect("spawn oracle");
        let mut input = String::new();
        for (k, b) in cases {
            input.push_str(&format!("{k} {b:08x}\n"));
        }
        child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
        let out = child.wait_with_output().expect("oracle output");
        assert!(out.status.success(), "oracle exited with {}", out.status);
        let parsed: Vec<(u32, u32)> = String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .map(|l| {
                let (e, d) = l.split_once(' ').expect("two columns");
                (u32::from_str_radix(e, 16).unwrap(), u32::from_str_radix(d, 16).unwrap())
            })
            .collect();
        assert_eq!(parsed.len(), cases.len());
        parsed
    }
}
