//! End-to-end tests of the `holonomy` binary: exit codes, file outputs,
//! determinism, and the environment override.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holonomy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("holonomy-cli-{}-{name}", std::process::id()));
    p
}

fn write_tmp(name: &str, contents: &str) -> PathBuf {
    let p = tmp_path(name);
    std::fs::write(&p, contents).unwrap();
    p
}

const PRECESSION: &str = r#"{
    "dim": 2, "duration": 6.283185307179586, "steps": 1024,
    "terms": [ { "coefficient": {"kind": "constant", "value": 1.0},
                 "matrix": {"re": [[0.5, 0.0],[0.0, -0.5]], "im": [[0.0,0.0],[0.0,0.0]]} } ],
    "initial_frame": {"re": [[0.8660254037844387],[0.5]], "im": [[0.0],[0.0]]}
}"#;

const NONCYCLIC: &str = r#"{
    "dim": 2, "duration": 3.0, "steps": 512,
    "terms": [ { "coefficient": {"kind": "constant", "value": 1.0},
                 "matrix": {"re": [[0.5, 0.2],[0.2, -0.5]], "im": [[0.0,0.1],[-0.1,0.0]]} } ],
    "initial_frame": {"re": [[1.0],[0.0]], "im": [[0.0],[0.0]]}
}"#;

#[test]
fn simulate_writes_trace_with_node_rows() {
    let scenario = write_tmp("sim.json", PRECESSION);
    let out_csv = tmp_path("sim.csv");
    let out = run(&["simulate", scenario.to_str().unwrap(), "--output", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_csv).unwrap();
    assert_eq!(csv.lines().count(), 1 + 1025);
    assert!(csv.starts_with("t,pdot_norm,F_11_real,F_11_imag,overlap"));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("\"cyclic\": true"), "{summary}");
}

#[test]
fn malformed_scenario_exits_2_with_field_path() {
    let bad = PRECESSION.replace("[0.5, 0.0]", "[0.5]");
    let scenario = write_tmp("bad.json", &bad);
    let out = run(&["simulate", scenario.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("terms[0].matrix"), "{msg}");
}

#[test]
fn separate_passes_on_cyclic_scenario() {
    let scenario = write_tmp("sep.json", &PRECESSION.replace("\"steps\": 1024", "\"steps\": 4096"));
    let report_path = tmp_path("sep-report.json");
    let out = run(&[
        "separate",
        scenario.to_str().unwrap(),
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(&report_path).unwrap();
    assert!(report.contains("\"separation_residual\""));
    assert!(report.contains("\"is_purely_holonomic\""));
    // determinism: a second run writes byte-identical output
    let report_path2 = tmp_path("sep-report2.json");
    let out2 = run(&[
        "separate",
        scenario.to_str().unwrap(),
        "--output",
        report_path2.to_str().unwrap(),
    ]);
    assert_eq!(out2.status.code(), Some(0));
    let report2 = std::fs::read_to_string(&report_path2).unwrap();
    assert_eq!(report, report2);
}

#[test]
fn separate_skips_matrix_forms_on_noncyclic() {
    let scenario = write_tmp("noncyc.json", NONCYCLIC);
    let out = run(&["separate", scenario.to_str().unwrap()]);
    // the operator separation holds for noncyclic evolution; exit 0 is still possible
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("\"matrix_residual\": \"skipped: noncyclic\""), "{report}");
    assert!(report.contains("matrix-forms-skipped: noncyclic"), "{report}");
}

#[test]
fn check_holonomic_exit_codes() {
    // the supplement design passes
    let gate_path = tmp_path("gate-check.json");
    let out = run(&[
        "design-gate",
        "--energies",
        "0,1,3",
        "--N",
        "1",
        "--m",
        "1",
        "--output",
        gate_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["check-holonomic", gate_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let msg = String::from_utf8_lossy(&out.stdout);
    assert!(msg.contains("purely_holonomic: true"));
    assert!(msg.contains("alpha:"));

    // a detuned pulse area fails the verdict (exit 1); the scenario widens
    // its own cyclicity tolerance so the check is reachable
    let gate = std::fs::read_to_string(&gate_path).unwrap();
    let detuned = gate
        .replace("3.141592653589793", "3.173008580125691")
        .replace("\"cyclicity\": 1e-6", "\"cyclicity\": 0.2");
    let detuned_path = write_tmp("gate-detuned.json", &detuned);
    let out = run(&["check-holonomic", detuned_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));

    // a non-cyclic scenario is an input error (exit 2)
    let noncyc = write_tmp("noncyc-check.json", NONCYCLIC);
    let out = run(&["check-holonomic", noncyc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn design_gate_infeasible_prints_inequality() {
    let out = run(&["design-gate", "--energies", "0,1,2", "--N", "1", "--m", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("|a1|^2"), "{msg}");
    assert!(msg.contains("(0, 1)"), "{msg}");
}

#[test]
fn design_gate_verify_round_trip() {
    let gate_path = tmp_path("gate-verify.json");
    let out = run(&[
        "design-gate",
        "--energies",
        "0,1,3",
        "--N",
        "1",
        "--m",
        "1",
        "--steps",
        "2048",
        "--verify",
        "--output",
        gate_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let msg = String::from_utf8_lossy(&out.stdout);
    assert!(msg.contains("predicted_u"));
    assert!(msg.contains("matches true"), "{msg}");
    // the emitted scenario is itself a valid input
    let out = run(&["simulate", gate_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn design_gate_trivial_warns() {
    let out = run(&["design-gate", "--energies", "0,1,3", "--N", "2", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let msg = String::from_utf8_lossy(&out.stdout);
    assert!(msg.contains("trivial"), "{msg}");
}

#[test]
fn convergence_order_two_on_smooth_scenario() {
    // two non-commuting terms give a genuine h² residual to fit
    let doc = r#"{
        "dim": 2, "duration": 6.283185307179586, "steps": 512,
        "terms": [
            { "coefficient": {"kind": "constant", "value": 1.0},
              "matrix": {"re": [[0.5, 0.0],[0.0, -0.5]], "im": [[0.0,0.0],[0.0,0.0]]} },
            { "coefficient": {"kind": "sinusoid", "amplitude": 0.3, "frequency": 1.0, "phase": 0.0},
              "matrix": {"re": [[0.0, 1.0],[1.0, 0.0]], "im": [[0.0,0.0],[0.0,0.0]]} }
        ],
        "initial_frame": {"re": [[0.8660254037844387],[0.5]], "im": [[0.0],[0.0]]}
    }"#;
    let scenario = write_tmp("conv.json", doc);
    let out = run(&["convergence", scenario.to_str().unwrap(), "--levels", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let msg = String::from_utf8_lossy(&out.stdout);
    assert!(msg.contains("order: "), "{msg}");
    let order: f64 = msg
        .lines()
        .find_map(|l| l.strip_prefix("order: "))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((1.7..=2.3).contains(&order), "order {order}");
}

#[test]
fn convergence_skips_fit_at_rounding_floor() {
    let doc = r#"{
        "dim": 2, "duration": 1.0, "steps": 64,
        "terms": [ { "coefficient": {"kind": "constant", "value": 0.0},
                     "matrix": {"re": [[0.0, 0.0],[0.0, 0.0]], "im": [[0.0,0.0],[0.0,0.0]]} } ],
        "initial_frame": {"re": [[1.0],[0.0]], "im": [[0.0],[0.0]]}
    }"#;
    let scenario = write_tmp("conv-zero.json", doc);
    let out = run(&["convergence", scenario.to_str().unwrap(), "--levels", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let msg = String::from_utf8_lossy(&out.stdout);
    assert!(msg.contains("skipped"), "{msg}");
}

#[test]
fn convergence_with_grid_aligned_jump_stays_order_two() {
    // piecewise-constant coefficient with its breakpoint on a grid node at
    // every refinement level: the midpoint samples never straddle the jump
    let doc = r#"{
        "dim": 2, "duration": 2.0, "steps": 512,
        "terms": [
            { "coefficient": {"kind": "piecewise-constant", "values": [1.0, 0.6], "breakpoints": [1.0]},
              "matrix": {"re": [[0.5, 0.0],[0.0, -0.5]], "im": [[0.0,0.0],[0.0,0.0]]} },
            { "coefficient": {"kind": "constant", "value": 0.4},
              "matrix": {"re": [[0.0, 1.0],[1.0, 0.0]], "im": [[0.0,0.0],[0.0,0.0]]} }
        ],
        "initial_frame": {"re": [[1.0],[0.0]], "im": [[0.0],[0.0]]}
    }"#;
    let scenario = write_tmp("conv-jump.json", doc);
    let out = run(&["convergence", scenario.to_str().unwrap(), "--levels", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let msg = String::from_utf8_lossy(&out.stdout);
    let order: f64 = msg
        .lines()
        .find_map(|l| l.strip_prefix("order: "))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((1.7..=2.3).contains(&order), "order {order}");
}

#[test]
fn convergence_rejects_bad_levels() {
    let scenario = write_tmp("conv-bad.json", PRECESSION);
    let out = run(&["convergence", scenario.to_str().unwrap(), "--levels", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_var_overrides_default_steps() {
    let steps_free = PRECESSION.replace("\"steps\": 1024,", "");
    let scenario = write_tmp("env.json", &steps_free);
    let out = bin()
        .args(["simulate", scenario.to_str().unwrap()])
        .env("HOLONOMY_DEFAULT_STEPS", "128")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let msg = String::from_utf8_lossy(&out.stdout);
    assert!(msg.contains("\"steps\": 128"), "{msg}");
    // an explicit steps field wins over the environment
    let scenario2 = write_tmp("env2.json", PRECESSION);
    let out = bin()
        .args(["simulate", scenario2.to_str().unwrap()])
        .env("HOLONOMY_DEFAULT_STEPS", "128")
        .output()
        .unwrap();
    let msg = String::from_utf8_lossy(&out.stdout);
    assert!(msg.contains("\"steps\": 1024"), "{msg}");
}

#[test]
fn unknown_command_and_missing_file() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["simulate", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn supplement_trace_has_constant_f22() {
    // for H(t) = ω(t)·𝓗 the frame-basis matrix elements are constants of
    // the motion, so the F_22 trace column must be flat
    let gate_path = tmp_path("gate-trace.json");
    let out = run(&[
        "design-gate",
        "--energies", "0,1,3", "--N", "1", "--m", "1",
        "--steps", "512",
        "--output", gate_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv_path = tmp_path("gate-trace.csv");
    let out = run(&[
        "simulate",
        gate_path.to_str().unwrap(),
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|&h| h == "F_22_imag").unwrap();
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect();
    let first = values[0];
    for v in &values {
        assert!((v - first).abs() < 1e-10, "F_22_imag drifted: {first} vs {v}");
    }
}
