//! End-to-end CLI behavior: exit codes, config plumbing, CSV output.

use std::path::Path;
use std::process::{Command, Output};

use qcollide::model::run_model;
use qcollide::sweep::parse_config;

fn qcollide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcollide"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn body_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();

    let bad_key = write_config(dir.path(), "model = direct\nbogus = 1\n");
    let out = qcollide(&["run", "--config", &bad_key]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");

    let out_of_range = write_config(dir.path(), "model = direct\nJ = 2.0\nOmega = 0\nT = 1\n");
    let out = qcollide(&["run", "--config", &out_of_range]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("J"));

    // Missing parameter for the chosen model.
    let incomplete = write_config(dir.path(), "model = indirect\nJ = 0.3\nOmega = 0\nT = 1\n");
    let out = qcollide(&["run", "--config", &incomplete]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa"));

    // Axes are not allowed for single runs.
    let with_axis = write_config(
        dir.path(),
        "model = direct\nJ = 0.3\nT = 1\naxis1 = Omega 0 1 5\n",
    );
    let out = qcollide(&["run", "--config", &with_axis]);
    assert_eq!(out.status.code(), Some(2));

    // Declared outputs must cover what the command emits.
    let wrong_outputs = write_config(
        dir.path(),
        "model = direct\nJ = 0.3\nOmega = 0\nT = 1\noutputs = N\n",
    );
    let out = qcollide(&["run", "--config", &wrong_outputs]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_code_4() {
    let out = qcollide(&["run", "--config", "/nonexistent/qcollide.cfg"]);
    assert_eq!(out.status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "model = direct\nJ = 0.3\nOmega = 0\nT = 1\nn_max = 50\nsettle_window = 5\n",
    );
    let out = qcollide(&[
        "run",
        "--config",
        &config,
        "--out",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn run_exports_a_trajectory_that_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let text = "model = direct\nJ = 0.3\nOmega = 0.95\nT = 1\nn_max = 40\nsettle_window = 5\n";
    let config = write_config(dir.path(), text);
    let out = qcollide(&["run", "--config", &config]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let body = body_lines(&stdout);
    assert_eq!(body[0], "n,D,dD,C_S,C_R,pop_S");

    // Re-parse the D column and compare against a library run, bit for bit.
    let spec = parse_config(text).unwrap();
    let traj = run_model(&spec.model_config_at(&[]).unwrap()).unwrap();
    assert_eq!(body.len() - 1, traj.records.len());
    for (line, rec) in body[1..].iter().zip(traj.records.iter()) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), rec.n);
        let d: f64 = fields[1].parse().unwrap();
        assert_eq!(d.to_bits(), rec.dist.to_bits(), "step {}", rec.n);
        let c_s: f64 = fields[3].parse().unwrap();
        assert_eq!(c_s.to_bits(), rec.sys_coherence.to_bits());
    }
    // The baseline row is the untouched optimal pair.
    assert!(body[1].starts_with("0,1.0000000000000000e0,0.0000000000000000e0,5.00"));
}

#[test]
fn sweep_emits_flagged_long_format_rows() {
    let dir = tempfile::tempdir().unwrap();
    // Low step cap: the strong-intracollision points cannot settle and must
    // come back flagged converged = false.
    let config = write_config(
        dir.path(),
        "model = direct\nJ = 0.3\nT = 0\naxis1 = Omega 0 1.5707 6\nn_max = 60\nsettle_window = 10\n",
    );
    let out_path = dir.path().join("sweep.csv");
    let out = qcollide(&[
        "sweep",
        "--config",
        &config,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("# qcollide "));
    let body = body_lines(&text);
    assert_eq!(body[0], "Omega,N,n_used,converged,status");
    assert_eq!(body.len() - 1, 6);
    let mut saw_unconverged = false;
    for line in &body[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        let n: f64 = fields[1].parse().unwrap();
        assert!(n >= 0.0);
        assert_eq!(fields[4], "ok");
        match fields[3] {
            "true" => {}
            "false" => saw_unconverged = true,
            other => panic!("bad converged flag {other}"),
        }
    }
    assert!(saw_unconverged, "expected at least one truncated point");
}

#[test]
fn sweep_respects_set_overrides_in_provenance_and_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "model = direct\nJ = 0.3\nT = 1\naxis1 = Omega 0 1 3\nn_max = 80\nsettle_window = 10\n",
    );
    let out = qcollide(&[
        "sweep", "--config", &config, "--set", "J=0.6", "--set", "n_max=40",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let echoed: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# J = "))
        .expect("J echoed in provenance")
        .parse()
        .unwrap();
    assert_eq!(echoed, 0.6);
    assert!(text.contains("# n_max = 40"), "{text}");
}

#[test]
fn threshold_traces_a_temperature_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "model = direct\nJ = 0.3\naxis1 = T 0 2 3\nn_max = 800\n",
    );
    let out = qcollide(&["threshold", "--config", &config, "--resolution", "0.02"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let body = body_lines(&text);
    assert_eq!(body[0], "T,Omega_star,bracket_lo,bracket_hi,resolved");
    assert_eq!(body.len() - 1, 3);
    for line in &body[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[4], "true");
        let lo: f64 = fields[2].parse().unwrap();
        let hi: f64 = fields[3].parse().unwrap();
        assert!(hi - lo <= 0.02);
        let threshold: f64 = fields[1].parse().unwrap();
        assert!(threshold > 0.0 && threshold < std::f64::consts::FRAC_PI_2);
    }
}

#[test]
fn threshold_flags_points_without_a_threshold() {
    let dir = tempfile::tempdir().unwrap();
    // Strong memory coupling: backflow is already active at Omega = 0, so the
    // bisection precondition fails and the point is flagged unresolved.
    let config = write_config(
        dir.path(),
        "model = indirect\nkappa = 0.9\nJ = 0.6\naxis1 = T 1 2 2\nn_max = 250\nsettle_window = 10\n",
    );
    let out = qcollide(&["threshold", "--config", &config, "--resolution", "0.05"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    for line in &body_lines(&text)[1..] {
        assert!(line.ends_with(",false"), "{line}");
    }
}

#[test]
fn oracle_check_passes_for_both_models() {
    let dir = tempfile::tempdir().unwrap();
    let direct = write_config(dir.path(), "model = direct\nJ = 0.4\nOmega = 0.9\nT = 1\n");
    let out = qcollide(&["oracle-check", "--config", &direct, "--collisions", "5"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));

    let indirect = write_config(
        dir.path(),
        "model = indirect\nkappa = 0.3\nJ = 0.5\nOmega = 0.9\nT = 1\n",
    );
    let out = qcollide(&["oracle-check", "--config", &indirect, "--collisions", "5"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn oracle_check_rejects_overflowing_chains() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "model = direct\nJ = 0.4\nOmega = 0.9\nT = 1\n");
    let out = qcollide(&["oracle-check", "--config", &config, "--collisions", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stdout_and_file_output_carry_the_same_body() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "model = direct\nJ = 0.3\nOmega = 0.5\nT = 1\nn_max = 30\nsettle_window = 5\n",
    );
    let to_stdout = qcollide(&["run", "--config", &config]);
    let out_path = dir.path().join("traj.csv");
    let to_file = qcollide(&[
        "run",
        "--config",
        &config,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(to_stdout.status.success() && to_file.status.success());
    let stdout_body = body_lines(std::str::from_utf8(&to_stdout.stdout).unwrap()).join("\n");
    let file_text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(stdout_body, body_lines(&file_text).join("\n"));
}
