//! Drives the compiled binary end to end: exit codes, JSON/CSV shape, and
//! rerun determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swaproute"))
        .args(args)
        .env_remove("SWAPROUTE_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scratch_dir(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("swaproute-cli-{test}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

#[test]
fn route_from_generator_flags_verifies() {
    let out = run(&[
        "route",
        "--family",
        "modified-butterfly",
        "--k",
        "2",
        "--r",
        "4",
        "--m",
        "5",
        "--seed",
        "7",
        "--router",
        "butterfly",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["verified"], serde_json::json!(true));
    assert_eq!(summary["m"], serde_json::json!(5));
    assert!(summary["depth"].as_u64().unwrap() >= 5);
}

#[test]
fn route_rejects_width_mismatch() {
    let dir = scratch_dir("mismatch");
    let g = dir.join("g.json");
    let c = dir.join("c.json");
    assert_eq!(
        code(&run(&["gen-graph", "--family", "modified-butterfly", "--k", "2", "--out",
            g.to_str().unwrap()])),
        0
    );
    assert_eq!(
        code(&run(&["gen-circuit", "--qubits", "64", "--layers", "3", "--out",
            c.to_str().unwrap()])),
        0
    );
    let out = run(&[
        "route", "--graph", g.to_str().unwrap(), "--circuit", c.to_str().unwrap(), "--router",
        "greedy",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    fs::remove_dir_all(dir).ok();
}

#[test]
fn complete_graph_routes_with_unit_overhead() {
    let out = run(&[
        "route", "--family", "complete", "--n", "8", "--m", "3", "--router", "greedy",
    ]);
    assert_eq!(code(&out), 0);
    let summary = stdout_json(&out);
    assert_eq!(summary["overhead"], serde_json::json!(1.0));
}

#[test]
fn schedule_files_round_trip_and_tampering_is_caught() {
    let dir = scratch_dir("roundtrip");
    let g = dir.join("g.json");
    let c = dir.join("c.json");
    let s = dir.join("s.json");
    run(&["gen-graph", "--family", "modified-butterfly", "--k", "2", "--seed", "3", "--out",
        g.to_str().unwrap()]);
    run(&["gen-circuit", "--qubits", "32", "--layers", "4", "--seed", "9", "--out",
        c.to_str().unwrap()]);
    let out = run(&[
        "route", "--graph", g.to_str().unwrap(), "--circuit", c.to_str().unwrap(), "--router",
        "greedy", "--seed", "1", "--out", s.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let args =
        ["verify", "--graph", g.to_str().unwrap(), "--circuit", c.to_str().unwrap(),
            "--schedule", s.to_str().unwrap()];
    let out = run(&args);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["valid"], serde_json::json!(true));

    // Dropping the final step leaves gates unexecuted.
    let mut schedule: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&s).unwrap()).unwrap();
    schedule["steps"].as_array_mut().unwrap().pop();
    fs::write(&s, serde_json::to_string(&schedule).unwrap()).unwrap();
    let out = run(&args);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("violation"));
    fs::remove_dir_all(dir).ok();
}

#[test]
fn scaling_reruns_are_byte_identical_and_sound() {
    let dir = scratch_dir("scaling");
    let first = dir.join("a.csv");
    let second = dir.join("b.csv");
    for path in [&first, &second] {
        let out = run(&[
            "scaling", "--ks", "2", "--seeds", "0,1,2", "--m", "5", "--router", "both", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let text = fs::read_to_string(&first).unwrap();
    assert_eq!(text, fs::read_to_string(&second).unwrap(), "rerun changed the CSV");

    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,m,r,seed,router,depth,overhead,overhead_per_log2n,ns_lower")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6, "3 seeds x 2 routers");
    for row in &rows {
        let depth: f64 = row[5].parse().unwrap();
        let ns_lower: f64 = row[8].parse().unwrap();
        assert!(ns_lower <= depth, "lower bound exceeds depth in {row:?}");
    }
    fs::remove_dir_all(dir).ok();
}

#[test]
fn scaling_needs_seeds() {
    let out = run(&["scaling", "--ks", "2", "--seeds", "", "--m", "5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_passes_on_the_three_qubit_clique() {
    let out = run(&["oracle", "--family", "complete", "--n", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["emulation"]["diameter"], serde_json::json!(2));
    assert_eq!(report["pass"], serde_json::json!(true));
}

#[test]
fn oracle_rejects_sizes_beyond_every_cap() {
    let out = run(&["oracle", "--family", "random-regular", "--n", "20", "--r", "3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn diameter_bound_reports_the_pinned_example() {
    let out = run(&["bounds", "diameter", "--states", "6", "--degree", "3", "--epsilon", "0.1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["diameter"], serde_json::json!(8));
}

#[test]
fn env_seed_is_the_default_and_flags_override_it() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_swaproute"))
        .args(["gen-circuit", "--qubits", "4", "--layers", "2"])
        .env("SWAPROUTE_SEED", "7")
        .output()
        .unwrap();
    let with_flag = run(&["gen-circuit", "--qubits", "4", "--layers", "2", "--seed", "7"]);
    assert_eq!(with_env.stdout, with_flag.stdout);

    let overridden = Command::new(env!("CARGO_BIN_EXE_swaproute"))
        .args(["gen-circuit", "--qubits", "4", "--layers", "2", "--seed", "3"])
        .env("SWAPROUTE_SEED", "7")
        .output()
        .unwrap();
    let plain = run(&["gen-circuit", "--qubits", "4", "--layers", "2", "--seed", "3"]);
    assert_eq!(overridden.stdout, plain.stdout);
}
