use std::path::Path;
use std::process::{Command, Output};

use spis_harness::{ResultRow, CSV_HEADER, SCENARIOS};

const SMALL: &str = r#"
scenario = "small"
seed = 7
ns = [50]
draws = [2000]
methods = ["SPIS", "OET"]
reference = "OET"

[model]
family = "exponential"
rate = 1.0

[target]
kind = "tail"
set = { type = "full_orthant", x0 = [1.5] }
"#;

fn spis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spis"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("spawn spis")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn strip_time(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(10);
            f.join(",")
        })
        .collect()
}

#[test]
fn list_scenarios_names_every_bundle() {
    let out = spis(&["list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for (name, _) in SCENARIOS {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn bundled_scenarios_validate() {
    for (name, _) in SCENARIOS {
        let out = spis(&["validate", name]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn run_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let out_path = dir.path().join("out.csv");
    let out = spis(&["run", &cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("small,SPIS,50,2000,"));
    assert!(rows[1].starts_with("small,OET,50,2000,"));
    assert!(rows[0].ends_with(",7"));
}

#[test]
fn rerun_is_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let a = spis(&["run", &cfg, "--workers", "1"]);
    let b = spis(&["run", &cfg, "--workers", "3"]);
    assert!(a.status.success() && b.status.success());
    let (a, b) = (
        String::from_utf8(a.stdout).unwrap(),
        String::from_utf8(b.stdout).unwrap(),
    );
    assert_eq!(strip_time(&a), strip_time(&b));
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let out = spis(&["run", &cfg, "--format", "json"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<ResultRow> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(spis_harness::to_json(&rows), text);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = value[0].as_object().unwrap().keys().map(String::as_str).collect();
    for col in CSV_HEADER.split(',') {
        assert!(keys.contains(&col), "{col} missing from JSON");
    }
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let no_methods = SMALL.replace(r#"methods = ["SPIS", "OET"]"#, "methods = []");
    let cfg = write(dir.path(), "bad.toml", &no_methods);
    let out = spis(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("methods"));

    let no_seed = SMALL.replace("seed = 7\n", "");
    let cfg = write(dir.path(), "noseed.toml", &no_seed);
    assert_eq!(spis(&["validate", &cfg]).status.code(), Some(2));

    let garbage = write(dir.path(), "garbage.toml", "this is = = not toml");
    assert_eq!(spis(&["validate", &garbage]).status.code(), Some(2));

    let cfg = write(dir.path(), "small.toml", SMALL);
    assert_eq!(spis(&["run", &cfg, "--workers", "0"]).status.code(), Some(2));
}

#[test]
fn runtime_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        spis(&["run", dir.path().join("missing.toml").to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    // n = 1 is below the integrability threshold of the exponential density.
    let density = r#"
scenario = "too-small"
seed = 1
ns = [1]
draws = [100]
methods = ["SPIS"]

[model]
family = "exponential"
rate = 1.0

[target]
kind = "density"
points = [[1.0]]
"#;
    let cfg = write(dir.path(), "density.toml", density);
    let out = spis(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with(CSV_HEADER));
}
