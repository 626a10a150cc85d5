//! End-to-end CLI behavior: exit codes, preset catalogue, config fail-fast
//! and output files.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hardylab")
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("hardylab_cli_{name}"))
}

#[test]
fn list_presets_names_required_catalogue() {
    let out = Command::new(bin()).arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "example5",
        "interval-shrink",
        "corollary8",
        "halfline-heat",
        "checkerboard-alpha2",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
    assert!(text.lines().count() >= 8);
    // every entry names the checks it exercises
    for line in text.lines() {
        assert!(
            [
                "hi",
                "thm4",
                "thm6",
                "cor5",
                "cor7",
                "lemma",
                "thm11",
                "ker1",
                "ker2",
                "thm16",
                "weyl",
                "hardy_constant",
                "halfline"
            ]
            .iter()
            .any(|c| line.contains(c)),
            "preset line does not name its checks: {line}"
        );
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tmp("cfg_err");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    // empty checks list
    let cfg = dir.join("empty.toml");
    std::fs::write(
        &cfg,
        r#"
[campaign]
name = "empty"
[domain]
kind = "interval"
length = 1.0
resolution = 0.125
[operator]
kind = "weighted_laplacian"
[checks]
names = []
"#,
    )
    .unwrap();
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
    // unknown key
    let cfg2 = dir.join("unknown.toml");
    std::fs::write(
        &cfg2,
        r#"
[campaign]
name = "unknown"
frobnicate = true
[domain]
kind = "interval"
length = 1.0
resolution = 0.125
[operator]
kind = "weighted_laplacian"
[checks]
names = ["hi"]
"#,
    )
    .unwrap();
    let out = Command::new(bin()).arg("run").arg(&cfg2).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // missing file
    let out = Command::new(bin())
        .arg("run")
        .arg(dir.join("nope.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // unknown preset
    let out = Command::new(bin())
        .args(["preset", "not-a-preset"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn violations_exit_1() {
    let dir = tmp("violation");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    // an absurdly tight half-line band forces reported violations
    let cfg = dir.join("tight.toml");
    std::fs::write(
        &cfg,
        format!(
            r#"
[campaign]
name = "tight-band"
[domain]
kind = "halfline_truncated"
length = 1.0
resolution = 0.0625
[operator]
kind = "weighted_laplacian"
[checks]
names = ["halfline"]
[output]
dir = "{}"
[tolerances]
halfline_band = 0.0001
"#,
            dir.display()
        ),
    )
    .unwrap();
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let summary = std::fs::read_to_string(dir.join("tight-band_summary.txt")).unwrap();
    assert!(summary.contains("FAIL"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn run_writes_requested_formats_and_passes() {
    let dir = tmp("formats");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            r#"
[campaign]
name = "mini"
seed = 3
[domain]
kind = "interval"
length = 1.0
resolution = 0.015625
[operator]
kind = "weighted_laplacian"
[sweep]
n_max = 3
random_vectors = 2
[checks]
names = ["hi", "thm4", "weyl"]
[output]
dir = "{}"
formats = ["csv", "json", "summary"]
"#,
            dir.display()
        ),
    )
    .unwrap();
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for suffix in ["bounds.csv", "summary.json", "summary.txt"] {
        let p = dir.join(format!("mini_{suffix}"));
        assert!(p.exists(), "missing {}", p.display());
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("mini_summary.json")).unwrap())
            .unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["pass"], true);
    assert_eq!(json["seed"], 3);
    // CSV header matches the declared column set
    let csv = std::fs::read_to_string(dir.join("mini_bounds.csv")).unwrap();
    assert!(csv.starts_with("name,domain,operator,c,a,eps,lhs,rhs,ratio,pass,tol\n"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn cache_build_and_reuse() {
    let dir = tmp("cache");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cached.toml");
    std::fs::write(
        &cfg,
        format!(
            r#"
[campaign]
name = "cached"
use_cache = true
[domain]
kind = "interval"
length = 1.0
resolution = 0.03125
[operator]
kind = "weighted_laplacian"
[sweep]
n_max = 2
random_vectors = 0
[checks]
names = ["hi"]
[output]
dir = "{}"
"#,
            dir.display()
        ),
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["cache", "build"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cache_dir = dir.join("cache");
    let count = std::fs::read_dir(&cache_dir).unwrap().count();
    assert_eq!(count, 1);
    // the campaign runs off the cached decomposition
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    // clearing reports one removed entry
    let out = Command::new(bin())
        .args(["cache", "clear", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("removed 1"));
    let _ = std::fs::remove_dir_all(&dir);
}
