use std::process::{Command, Output};

fn thompson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thompson"))
        .args(args)
        .env_remove("THOMPSON_MAX_VERTICES")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn relations_hold() {
    let o = thompson(&["relations-check"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("identity"));
}

#[test]
fn orbit_graph_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.dot");
    let o = thompson(&["orbit-graph", "--point", "1/2", "--radius", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph"));
    for label in ["\"1/2\"", "\"1/4\"", "\"3/4\""] {
        assert!(dot.contains(label), "{label} missing from {dot}");
    }
}

#[test]
fn bad_input_exit_codes() {
    // floats are refused, only exact dyadics are accepted
    assert_eq!(code(&thompson(&["orbit-graph", "--point", "0.5", "--radius", "1"])), 2);
    assert_eq!(code(&thompson(&["orbit-graph", "--point", "1/2", "--radius", "1.5"])), 2);
    assert_eq!(code(&thompson(&["frobnicate"])), 2);
    // endpoints are fixed by every element
    assert_eq!(code(&thompson(&["orbit-graph", "--point", "1", "--radius", "1"])), 3);
}

#[test]
fn resource_limits() {
    let o = Command::new(env!("CARGO_BIN_EXE_thompson"))
        .args(["cayley-ball", "--radius", "4"])
        .env("THOMPSON_MAX_VERTICES", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
    assert_eq!(code(&thompson(&["cayley-ball", "--radius", "9"])), 4);
}

#[test]
fn confinement_pass_and_fail() {
    let o = thompson(&["confine-verify", "--set", "1/2", "--radius", "0"]);
    assert_eq!(code(&o), 0);
    let o = thompson(&["confine-verify", "--oracle", "cyclic", "--word", "x0", "--radius", "4", "--elements", "x0"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("x1^-1x0^-1x1x0"));
}

#[test]
fn json_report_fields() {
    let o = thompson(&["--json", "push-left", "--set", "3/4,7/8"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "push-left");
    assert_eq!(v["passed"], true);
    assert_eq!(v["result"]["k"], 3);
    assert!(v["config"].is_object());
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn seeded_runs_repeat() {
    let args = ["--json", "growth", "--point", "1/3", "--max-radius", "4", "--sample-roots", "5", "--seed", "7"];
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let a = strip(thompson(&args));
    assert_eq!(a["seed"], 7);
    assert_eq!(a, strip(thompson(&args)));
}

#[test]
fn growth_csv() {
    let o = thompson(&["growth", "--point", "1/2", "--max-radius", "4", "--sample-roots", "1"]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("graph_id,root,n,ball_size"));
    let sizes: Vec<&str> = lines.take(5).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(sizes, ["1", "3", "6", "11", "19"]);
}

#[test]
fn lemma_chain_orders_intervals() {
    let o = thompson(&["lemma-chain", "--words", "x0;x1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ordering holds"));
    assert_eq!(code(&thompson(&["lemma-chain", "--words", "x0;x0^-1x0"])), 3);
}
