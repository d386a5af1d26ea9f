//! End-to-end tests of the command-line surface: exit codes, file outputs,
//! and trace reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn jamgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jamgame"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_cfg(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.cfg");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

/// Small, fast scenario used by most tests.
const SMALL: &str = "game.steps = 20\n";

#[test]
fn allocate_reports_certified_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "");
    let out = jamgame(&["allocate", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mqam_sufficient = true"), "{text}");
    assert!(text.contains("converged = true"));
    assert!(!text.contains("warning"));

    // --out writes the same report to a file
    let report_path = dir.path().join("report.txt");
    let out = jamgame(&[
        "allocate",
        "--config",
        &cfg,
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&report_path).unwrap(), text);
}

#[test]
fn allocate_non_certified_instance_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    // noise below the certification threshold but still high enough for the
    // best-response iteration to settle
    let cfg = write_cfg(dir.path(), "physical.sigma = 0.03\n");
    let out = jamgame(&["allocate", "--config", &cfg]);
    assert!(out.status.success(), "non-certified is a warning, not an error");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mqam_sufficient = false"), "{text}");
    assert!(text.contains("warning = non-certified equilibrium"));
}

#[test]
fn allocate_oscillating_instance_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // deep in the mixed-strategy regime the pure best responses cycle; the
    // solver reports non-convergence with oscillation diagnostics
    let cfg = write_cfg(dir.path(), "physical.sigma = 1e-4\n");
    let out = jamgame(&["allocate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("did not converge"), "{err}");
    assert!(err.contains("last profile change"), "{err}");
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "physical.modulation_size = 3\n");
    let out = jamgame(&["allocate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("M must be in {2,4,16,64,256}"), "{err}");

    let out = jamgame(&["allocate", "--config", "/definitely/not/there.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_deterministic_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL);
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    let st = jamgame(&["simulate", "--config", &cfg, "--out", out1.to_str().unwrap()]);
    assert!(st.status.success());
    let st = jamgame(&["simulate", "--config", &cfg, "--out", out2.to_str().unwrap()]);
    assert!(st.status.success());

    let trace1 = std::fs::read(out1.join("trace.csv")).unwrap();
    let trace2 = std::fs::read(out2.join("trace.csv")).unwrap();
    assert_eq!(trace1, trace2, "repeated runs must be byte-identical");

    let text = String::from_utf8(trace1).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 22, "header plus 21 records");
    assert!(lines[0].starts_with("t,a1_x,a1_y,a1_heading,a1_comm"));
    assert!(lines[0].ends_with("certified,converged"));

    let summary = std::fs::read_to_string(out1.join("summary.txt")).unwrap();
    assert!(summary.contains("records = 21"));
    assert!(summary.contains("payoff_integral ="));
}

#[test]
fn simulate_default_steps_produce_201_rows() {
    let dir = tempfile::tempdir().unwrap();
    // myopic mode keeps the 200-step default run fast
    let cfg = write_cfg(dir.path(), "");
    let out = dir.path().join("run");
    let st = jamgame(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--mode",
        "myopic",
    ]);
    assert!(st.status.success());
    let text = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(text.lines().count(), 202);
}

#[test]
fn simulate_zero_speeds_hold_positions() {
    let dir = tempfile::tempdir().unwrap();
    let body = "game.steps = 10\n\
        agents.a1.speed = 0\nagents.a2.speed = 0\n\
        agents.b1.speed = 0\nagents.b2.speed = 0\n";
    let cfg = write_cfg(dir.path(), body);
    let out = dir.path().join("run");
    let st = jamgame(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(st.status.success());
    let text = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    let mut rows = text.lines().skip(1);
    let first: Vec<String> = rows
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        // position columns sit at 1,2 then every 6 columns per agent
        for agent in 0..4 {
            let base = 1 + agent * 6;
            assert_eq!(cells[base], first[base]);
            assert_eq!(cells[base + 1], first[base + 1]);
        }
    }
}

#[test]
fn check_prints_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "");
    let out = jamgame(&["check", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict = PSNE certified"), "{text}");

    let cfg = write_cfg(dir.path(), "physical.sigma = 1e-4\n");
    let out = jamgame(&["check", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("verdict = not certified; MSNE guaranteed to exist"),
        "{text}"
    );
}

#[test]
fn sweep_runs_each_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "game.steps = 10\ngame.mode = myopic\n");
    let out = dir.path().join("sweep");
    let st = jamgame(&[
        "sweep",
        "--config",
        &cfg,
        "--vary",
        "physical.energy",
        "--range",
        "50:150:3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let index = std::fs::read_to_string(out.join("sweep.txt")).unwrap();
    assert!(index.contains("run_000: physical.energy = 50"));
    assert!(index.contains("run_001: physical.energy = 100"));
    assert!(index.contains("run_002: physical.energy = 150"));
    for run in ["run_000", "run_001", "run_002"] {
        assert!(out.join(run).join("trace.csv").exists());
        assert!(out.join(run).join("summary.txt").exists());
    }

    // a bad range is an input error
    let st = jamgame(&[
        "sweep",
        "--config",
        &cfg,
        "--vary",
        "physical.energy",
        "--range",
        "50:150",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(2));
}
