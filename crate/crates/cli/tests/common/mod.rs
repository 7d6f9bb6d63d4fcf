//! Shared helpers for CLI integration tests.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU64, Ordering};

pub fn aplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aplab"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

static DIR_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Fresh scratch directory under the target tmp dir.
pub fn scratch_dir(label: &str) -> PathBuf {
    let k = DIR_COUNTER.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!(
        "aplab-test-{}-{}-{}",
        label,
        std::process::id(),
        k
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
