//! Acceptance check for the command-line front end: output determinism.
//! The core library's quantitative acceptance suite lives in
//! `crates/core/tests/acceptance.rs`.

use std::path::PathBuf;
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_landauer"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("landauer-accept-{tag}-{}", std::process::id()));
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn criterion_12_identical_seeds_give_byte_identical_files() {
    let dir_a = temp_dir("det-a");
    let dir_b = temp_dir("det-b");
    let dir_c = temp_dir("det-c");
    let base = [
        "distribution",
        "--num-steps",
        "16",
        "--swap-prob",
        "0.4",
        "--therm-steps",
        "2",
        "--step-energy",
        "0.5",
        "--samples",
        "20000",
        "--seed",
        "12345",
        "--output",
    ];
    for dir in [&dir_a, &dir_b] {
        let output = binary()
            .args(base)
            .arg(dir.to_str().unwrap())
            .output()
            .expect("binary runs");
        assert!(output.status.success());
    }
    // A third run pinned to one worker must still merge identically.
    let output = binary()
        .args(base)
        .arg(dir_c.to_str().unwrap())
        .env("LANDAUER_WORKERS", "1")
        .output()
        .unwrap();
    assert!(output.status.success());

    let mut ok = true;
    for file in ["distribution.csv", "summary.json"] {
        let bytes_a = std::fs::read(dir_a.join(file)).unwrap();
        ok &= bytes_a == std::fs::read(dir_b.join(file)).unwrap();
        ok &= bytes_a == std::fs::read(dir_c.join(file)).unwrap();
    }
    println!(
        "ACCEPTANCE 12 determinism: {} (distribution.csv and summary.json byte-identical \
         across reruns and worker counts)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}
