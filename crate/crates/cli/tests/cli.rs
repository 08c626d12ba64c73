#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::{Arc, Mutex};

use support::MockServer;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn demo(rel: &str) -> String {
    repo().join("demo").join(rel).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_namegender"))
        .args(args)
        .env_remove("NAMEGENDER_GENDERIZE_KEY")
        .env_remove("NAMEGENDER_FACE_KEY")
        .env_remove("NAMEGENDER_IMG_KEY")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn infer_ssa_female() {
    let o = run(&["infer", "Ada Lovelace", "--methods", "ssa", "--ssa-dir", &demo("ssa")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let fields: Vec<&str> = out.trim_end().split('\t').collect();
    assert_eq!(fields[..2], ["SSA", "female"]);
    // 30 male and 6990 female births
    let expected = 2.0 * 30.0 / 7020.0 - 1.0;
    assert!((fields[2].parse::<f64>().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn infer_unknown_name_abstains_with_success() {
    let o = run(&["infer", "Zzyzx Q", "--methods", "ssa", "--ssa-dir", &demo("ssa")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "SSA\tunknown\t0\n");
}

#[test]
fn usage_errors_exit_2() {
    let ssa = demo("ssa");
    for args in [
        vec!["infer", "", "--methods", "ssa", "--ssa-dir", &ssa],
        vec!["infer", "Ada", "--methods", "census"],
        vec!["infer", "Ada", "--methods", "nope", "--ssa-dir", &ssa],
        vec!["infer", "Ada", "--methods", "mixed1", "--mode", "replay"],
        vec!["infer", "Ada", "--methods", "ssa", "--ssa-dir", &ssa, "--country", "XX"],
        vec!["infer", "Ada", "--methods", "ssa", "--ssa-dir", &ssa, "--thumbnails", "6"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["infer", "Ada", "--methods", "ssa", "--ssa-dir", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = run(&["infer", "Nobody Here", "--methods", "genderize", "--mode", "replay", "--fixtures", &demo("fixtures")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("name=nobody"));
}

#[test]
fn dictionary_country_modes() {
    let dict = demo("nam_dict.txt");
    let with = run(&["infer", "Andrea Rossi", "--country", "IT", "--methods", "dict", "--dict-file", &dict]);
    assert_eq!(stdout(&with), "Dict\tmale\t1\n");
    let without = run(&[
        "infer", "Andrea Rossi", "--country", "IT", "--methods", "dict", "--dict-file", &dict, "--dict-country", "without",
    ]);
    assert_eq!(stdout(&without), "Dict\tfemale\t-1\n");
}

#[test]
fn evaluate_rejects_bad_rows_with_row_number() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    std::fs::write(&data, "full_name,country,gender\nAda Lovelace,GB,F\nJohn Smith,US,X\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "evaluate", &data.display().to_string(), "--methods", "ssa", "--ssa-dir", &demo("ssa"),
        "--out-dir", &out.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));
}

#[test]
fn evaluate_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out").display().to_string();
    let o = run(&["evaluate", &demo("dataset.csv"), "--config", &demo("namegender.toml"), "--out-dir", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = std::fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(stdout(&o).starts_with(&report));
    let again = run(&["report", &out, "--min-country-instances", "5"]);
    assert!(again.status.success(), "{}", stderr(&again));
    assert_eq!(stdout(&again), report);
}

#[test]
fn evaluate_custom_country_column() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    std::fs::write(&data, "full_name,nation,gender\nAndrea Rossi,IT,M\nAndrea Schmidt,DE,F\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "evaluate", &data.display().to_string(), "--methods", "dict", "--dict-file", &demo("nam_dict.txt"),
        "--country-column", "nation", "--min-country-instances", "1", "--out-dir", &out.display().to_string(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let countries = std::fs::read_to_string(out.join("countries.csv")).unwrap();
    assert_eq!(countries, "country,instances,backend,correct,accuracy\nDE,1,Dict,1,1\nIT,1,Dict,1,1\n");
}

fn cache_line(query: &str, payload_b64: &str) -> String {
    format!(
        "{{\"backend\":\"Genderize\",\"query\":\"{query}\",\"fetched_at\":\"2024-01-01T00:00:00.000Z\",\"status\":200,\"payload_b64\":\"{payload_b64}\"}}\n"
    )
}

#[test]
fn cache_stats_and_prune() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    std::fs::write(&path, "").unwrap();
    let p = path.display().to_string();
    let o = run(&["cache", "stats", "--cache-file", &p]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().all(|l| l.ends_with("\t0")), "{}", stdout(&o));

    let text = [cache_line("name=a", "e30="), cache_line("name=b", "e30="), cache_line("name=a", "W10=")].concat();
    std::fs::write(&path, text).unwrap();
    let o = run(&["cache", "stats", "--cache-file", &p]);
    assert!(stdout(&o).contains("Genderize\t2\n"), "{}", stdout(&o));
    assert!(stdout(&o).contains("superseded\t1\n"));
    let o = run(&["cache", "prune", "--cache-file", &p]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
    assert!(std::fs::read_to_string(&path).unwrap().contains("W10="));
}

#[test]
fn warm_requires_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.jsonl").display().to_string();
    let o = run(&["cache", "warm", &demo("dataset.csv"), "--methods", "genderize,face", "--cache-file", &cache]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn warm_then_replay_without_network() {
    let base = Arc::new(Mutex::new(String::new()));
    let b = base.clone();
    let server = MockServer::start(move |seen| {
        let base = b.lock().unwrap().clone();
        let t = &seen.target;
        if t.starts_with("/genderize") {
            let gender = if t.contains("name=ada") { "\"female\"" } else { "null" };
            (200, format!(r#"{{"name":"x","gender":{gender},"probability":0.9,"count":3}}"#).into_bytes())
        } else if t.starts_with("/search") {
            let link = format!("{base}/thumb/{}", t.len());
            (200, format!(r#"{{"items":[{{"link":"{link}"}}]}}"#).into_bytes())
        } else if t.starts_with("/thumb/") {
            (200, t.as_bytes().to_vec())
        } else {
            let body = r#"{"faces":[{"face_rectangle":{"top":0,"left":0,"width":9,"height":9},"attributes":{"gender":{"value":"Male","confidence":70}}}]}"#;
            (200, body.as_bytes().to_vec())
        }
    });
    *base.lock().unwrap() = server.url.clone();

    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    std::fs::write(&data, "full_name,country,gender\nAda Lovelace,GB,F\nSam Rivers,,M\n").unwrap();
    let cache = dir.path().join("c.jsonl").display().to_string();
    let data = data.display().to_string();
    let endpoints = [
        "--endpoint-genderize".to_string(),
        format!("{}/genderize", server.url),
        "--endpoint-images".to_string(),
        format!("{}/search", server.url),
        "--endpoint-face".to_string(),
        format!("{}/detect", server.url),
    ];
    let mut warm: Vec<&str> = vec!["cache", "warm", &data, "--methods", "mixed1,mixed2", "--cache-file", &cache, "--rate-limit", "0"];
    warm.extend(endpoints.iter().map(String::as_str));
    let o = Command::new(env!("CARGO_BIN_EXE_namegender"))
        .args(&warm)
        .env("NAMEGENDER_GENDERIZE_KEY", "g")
        .env("NAMEGENDER_IMG_KEY", "i")
        .env("NAMEGENDER_FACE_KEY", "f")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let fetched = server.requests().len();
    // two name lookups, two searches, two thumbnails, two detections
    assert_eq!(fetched, 8);

    let out = dir.path().join("out").display().to_string();
    let o = run(&[
        "evaluate", &data, "--mode", "replay", "--methods", "genderize,face,mixed1,mixed2", "--cache-file", &cache,
        "--min-country-instances", "1", "--out-dir", &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(server.requests().len(), fetched);
    let methods = std::fs::read_to_string(dir.path().join("out/methods.csv")).unwrap();
    assert!(methods.contains("Mixed1,accuracy,1\n"), "{methods}");
}
