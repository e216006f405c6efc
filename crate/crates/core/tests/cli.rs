use std::path::PathBuf;
use std::process::{Command, Output};

use posswitch::system::parse_system;
use posswitch::{greedy_trajectory, Direction, MonotoneObjective};
use serde_json::Value;

fn system(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("systems").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posswitch")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path(name: &str) -> String {
    system(name).to_string_lossy().into_owned()
}

#[test]
fn reports_are_reproducible() {
    for file in ["fig1.toml", "counterexample.toml", "iru_running.toml"] {
        for args in [
            vec!["analyze", &path(file), "--oracle-depth", "3", "--seed", "11"],
            vec!["verify", &path(file), "--max-depth", "3", "--trials", "2", "--seed", "11"],
            vec!["hourglass", &path(file), "--samples", "200", "--seed", "5"],
        ] {
            let args: Vec<&str> = args.iter().map(|s| s.as_ref()).collect();
            let a = run(&args);
            let b = run(&args);
            assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
            assert_eq!(a.stdout, b.stdout, "{args:?}");
        }
    }
}

#[test]
fn trajectory_golden_file() {
    let out = run(&["trajectory", &path("iru_running.toml"), "--steps", "6", "--direction", "max", "--nu", "l1"]);
    assert!(out.status.success());
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/trajectory_iru_running.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &out.stdout).unwrap();
    }
    let expected = std::fs::read(&golden).expect("golden file exists; rerun with UPDATE_GOLDEN=1");
    assert_eq!(String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&expected));
}

#[test]
fn trajectory_matches_library() {
    let doc = json(&run(&["trajectory", &path("iru_running.toml"), "--steps", "6", "--x0", "1,2", "--nu", "l1", "--nu", "linf"]));
    let set = parse_system(system("iru_running.toml")).unwrap().evaluate(1_000_000).unwrap();
    let mut lib = greedy_trajectory(&set, &[1.0, 2.0], 6, Direction::Max).unwrap();
    lib.evaluate(&MonotoneObjective::L1).unwrap();
    lib.evaluate(&MonotoneObjective::Linf).unwrap();
    let expected = serde_json::to_value(&lib).unwrap();
    assert_eq!(doc["result"]["trajectory"], expected);
}

#[test]
fn analyze_verdicts() {
    let doc = json(&run(&["analyze", &path("fig1_stable.toml")]));
    let a = &doc["result"]["analysis"];
    assert_eq!(a["stable"], true);
    assert!((a["rho_max"].as_f64().unwrap() - 0.9).abs() < 1e-12);

    let doc = json(&run(&["analyze", &path("counterexample.toml")]));
    let a = &doc["result"]["analysis"];
    assert_eq!(a["hset_status"]["status"], "falsified");
    assert_eq!(a["hset_status"]["x"], serde_json::json!([1.0, 1.0]));
    assert_eq!(a["verdict_basis"], "extrema-only");
    assert_eq!(doc["seed"], 0);
}

#[test]
fn graph_and_expression_files_agree() {
    let a = json(&run(&["analyze", &path("fig1.toml")]));
    let b = json(&run(&["analyze", &path("fig1_graph.toml")]));
    assert_eq!(a["result"]["analysis"], b["result"]["analysis"]);
}

#[test]
fn verify_flags_non_h_growth() {
    let doc = json(&run(&["verify", &path("counterexample.toml"), "--max-depth", "2", "--trials", "1"]));
    let checks = doc["result"]["checks"].as_array().unwrap();
    let depth2 = checks.iter().find(|c| c["name"] == "depth-2-products").unwrap();
    assert_eq!(depth2["status"], "expected-for-non-H");
    assert!(depth2["detail"]["jsr_lower"].as_f64().unwrap() >= 5.0 - 1e-9);

    let doc = json(&run(&["verify", &path("iru_positive.toml"), "--max-depth", "6", "--trials", "2"]));
    assert_eq!(doc["result"]["all_pass"], true);
}

#[test]
fn hourglass_reports() {
    let doc = json(&run(&["hourglass", &path("iru_positive.toml")]));
    assert_eq!(doc["result"]["hset_status"], "sampled-pass");
    assert_eq!(doc["result"]["verdict"]["samples_tested"], 1000);

    let doc = json(&run(&["hourglass", &path("counterexample.toml"), "--include-witness", "1,1"]));
    assert_eq!(doc["result"]["hset_status"], "falsified");
    assert_eq!(doc["result"]["verdict"]["witness"]["x"], serde_json::json!([1.0, 1.0]));
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("posswitch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.toml");
    std::fs::write(&empty, "").unwrap();
    let empty = empty.to_string_lossy().into_owned();

    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["analyze", &empty]), 2);
    assert_eq!(code(&["analyze", &path("missing.toml")]), 2);
    assert_eq!(code(&["hourglass", &path("iru_running.toml"), "--samples", "0"]), 2);
    assert_eq!(code(&["verify", &path("iru_positive.toml"), "--max-depth", "7"]), 3);
    assert_eq!(code(&["trajectory", &path("counterexample.toml"), "--steps", "3"]), 4);
    assert_eq!(code(&["bogus"]), 2);

    let out = run(&["trajectory", &path("iru_running.toml"), "--x0", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x0 must be strictly positive"));

    let out = run(&["trajectory", &path("counterexample.toml")]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[1.0, 1.0]"));
    std::fs::remove_dir_all(dir).ok();
}
