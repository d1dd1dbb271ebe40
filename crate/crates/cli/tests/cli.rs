use std::process::Command;

fn searchtrack(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_searchtrack"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn generate_then_run_writes_csv_with_provenance_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("desk.json");
    let csv = dir.path().join("ep.csv");
    assert!(searchtrack(&["generate", "desk", "--out", config.to_str().unwrap()]).status.success());
    let out = searchtrack(&["run", "--config", config.to_str().unwrap(), "--seed", "3", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&csv).unwrap();
    let comments: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(comments.iter().any(|l| l.contains("seed") && l.contains('3')));
    assert!(comments.iter().any(|l| l.contains("digest")));
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    // header plus one row per step
    assert_eq!(rows, 121);
}

#[test]
fn bad_config_reports_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"name": "x", "no_such_field": 1}"#).unwrap();
    let out = searchtrack(&["run", "--config", config.to_str().unwrap(), "--out", "/dev/null"]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert!(err["error"].is_string());
    assert!(err["message"].as_str().unwrap().contains("no_such_field"));
}

#[test]
fn unknown_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = searchtrack(&["generate", "moon", "--out", dir.path().join("x.json").to_str().unwrap()]);
    assert!(!out.status.success());
}
