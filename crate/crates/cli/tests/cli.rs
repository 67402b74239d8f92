use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fhj_cli::{exit, parse_config};

fn fhj() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fhj"));
    c.env_remove("FHJ_THREADS");
    c
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL: &str = r#"{"problem": {"nodes": 32, "time_steps": 64, "horizon": 0.25}, "seed": 7}"#;

fn read_u_column(path: &Path) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let last = r.headers().unwrap().len() - 1;
    r.records().map(|rec| rec.unwrap()[last].parse().unwrap()).collect()
}

#[test]
fn minimal_config_gets_defaults() {
    let cfg = parse_config(r#"{"problem": {"hamiltonian": {"kind": "transport", "velocity": [1.0]}}}"#).unwrap();
    let p = &cfg.problem;
    assert_eq!(p.alpha.value(), 0.5);
    assert_eq!((p.horizon, p.nodes, p.time_steps, p.cfl_safety), (0.5, 256, 512, 0.9));
}

#[test]
fn out_of_range_alpha_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", r#"{"problem": {"alpha": 1.5}}"#);
    let out = fhj()
        .args(["solve", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), i32::from(exit::CONFIG));
    assert!(stderr(&out).contains("problem.alpha"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", r#"{"problem": {"alpah": 0.5}}"#);
    let out = fhj()
        .args(["solve", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), i32::from(exit::CONFIG));
    assert!(stderr(&out).contains("alpah"), "{}", stderr(&out));
}

#[test]
fn cfl_violation_is_found_by_solve_not_parse() {
    let text = r#"{"problem": {"stepping": "explicit", "nodes": 32, "time_steps": 8}}"#;
    assert!(parse_config(text).is_ok());
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", text);
    let out = fhj()
        .args(["solve", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&out), i32::from(exit::CFL), "{}", stderr(&out));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn zero_hamiltonian_keeps_initial_data() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(
        dir.path(),
        "c.json",
        r#"{"problem": {"hamiltonian": {"kind": "constant", "value": 0}, "nodes": 16, "time_steps": 8}}"#,
    );
    let out = fhj()
        .args(["solve", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let u = read_u_column(&dir.path().join("solution.csv"));
    assert_eq!(u.len(), 9 * 16);
    for (k, v) in u.iter().enumerate() {
        let x = (k % 16) as f64 / 16.0;
        assert_eq!(*v, (2.0 * std::f64::consts::PI * x).sin());
    }
}

#[test]
fn csv_round_trips_solver_values() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", SMALL);
    let out = fhj()
        .args(["solve", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let problem = parse_config(SMALL).unwrap().problem.build().unwrap();
    let sol = fhj_core::solver::solve(&problem).unwrap();
    let expected: Vec<f64> = sol.trajectory.iter().flat_map(|s| s.values().to_vec()).collect();
    let got = read_u_column(&dir.path().join("solution.csv"));
    assert_eq!(got.len(), expected.len());
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-15, "{a} vs {b}");
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", SMALL);
    for run in ["a", "b"] {
        let out = fhj()
            .args(["solve", "--format", "both", "-c"])
            .arg(&c)
            .arg("-o")
            .arg(dir.path().join(run))
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for f in ["solution.csv", "solution.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }
}

#[test]
fn json_output_echoes_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", SMALL);
    let out = fhj()
        .args(["solve", "--format", "json", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("solution.json")).unwrap()).unwrap();
    assert_eq!(v["metadata"]["config"]["seed"], 7);
    assert_eq!(v["metadata"]["config"]["problem"]["alpha"], 0.5);
    assert_eq!(v["times"].as_array().unwrap().len(), 65);
    assert!(!dir.path().join("solution.csv").exists());
}

#[test]
fn plot_data_writes_one_file_per_slice() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(
        dir.path(),
        "c.json",
        r#"{"problem": {"dim": 2, "nodes": 8, "time_steps": 4, "hamiltonian": {"kind": "transport", "velocity": [1, 0.5]}}}"#,
    );
    let out = fhj()
        .args(["solve", "--plot-data", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let slices: Vec<_> = fs::read_dir(dir.path().join("slices")).unwrap().collect();
    assert_eq!(slices.len(), 5);
    let text = fs::read_to_string(dir.path().join("slices").join("slice_0000.csv")).unwrap();
    assert!(text.starts_with("x,y,u\n"));
    let head = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(head.starts_with("t,x,y,u\n"));
}

#[test]
fn verify_reports_json_lines_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", SMALL);
    let out = fhj()
        .args(["verify", "--suite", "canonical", "-c"])
        .arg(&c)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<String> = text
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            assert_eq!(v["passed"], true, "{l}");
            v["check_name"].as_str().unwrap().to_owned()
        })
        .collect();
    for want in [
        "comparison_shifted",
        "holder_time",
        "lipschitz_space",
        "alpha_convergence",
    ] {
        assert!(names.iter().any(|n| n == want), "missing {want} in {names:?}");
    }
}

#[test]
fn unknown_suite_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", SMALL);
    let out = fhj()
        .args(["verify", "--suite", "everything", "-c"])
        .arg(&c)
        .output()
        .unwrap();
    assert_eq!(code(&out), i32::from(exit::CONFIG));
}

#[test]
fn command_field_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(
        dir.path(),
        "c.json",
        r#"{"command": "verify", "problem": {"nodes": 8, "time_steps": 4}}"#,
    );
    let out = fhj()
        .args(["solve", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), i32::from(exit::CONFIG));
}

#[test]
fn commands_leave_the_config_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", SMALL);
    let before = (fs::read(&c).unwrap(), fs::metadata(&c).unwrap().modified().unwrap());
    fhj()
        .args(["solve", "-c"])
        .arg(&c)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    fhj()
        .args(["verify", "--suite", "comparison", "-c"])
        .arg(&c)
        .output()
        .unwrap();
    fhj().args(["refine", "--levels", "2", "-c"]).arg(&c).output().unwrap();
    let after = (fs::read(&c).unwrap(), fs::metadata(&c).unwrap().modified().unwrap());
    assert_eq!(before, after);
}

#[test]
fn refine_prints_a_decreasing_table() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "c.json", SMALL);
    let out = fhj().args(["refine", "--levels", "3", "-c"]).arg(&c).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let errors: Vec<f64> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["error"].as_f64().unwrap())
        .collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn refine_without_an_oracle_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(
        dir.path(),
        "c.json",
        r#"{"problem": {"nodes": 16, "time_steps": 16, "hamiltonian": {"kind": "eikonal", "speed": 1}}}"#,
    );
    let out = fhj().args(["refine", "--levels", "2", "-c"]).arg(&c).output().unwrap();
    assert_eq!(code(&out), i32::from(exit::CONFIG), "{}", stderr(&out));
}

#[test]
fn mittag_leffler_table_matches_erfc_identity() {
    let out = fhj()
        .args(["specialfun-table", "--fn", "mittag_leffler", "--alpha", "0.5"])
        .args(["--from", "-2", "--to", "0", "--step", "0.5"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["z", "value"]);
    let rows: Vec<(f64, f64)> = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 5);
    for (z, v) in rows {
        let s = -z;
        let want = (s * s).exp() * fhj_core::specialfun::erfc(s);
        assert!((v - want).abs() < 1e-12, "z = {z}: {v} vs {want}");
    }
}

#[test]
fn gamma_table_reports_poles() {
    let out = fhj()
        .args([
            "specialfun-table",
            "--fn",
            "gamma",
            "--from",
            "-1",
            "--to",
            "1",
            "--step",
            "0.5",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), i32::from(exit::CONFIG), "{}", stderr(&out));
}

#[test]
fn transport_oracle_starts_from_the_sine() {
    let out = fhj()
        .args([
            "oracle",
            "--variant",
            "transport",
            "--alpha",
            "0.5",
            "--nodes",
            "8",
            "--steps",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<Vec<f64>> = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3 * 8);
    for row in &rows[..8] {
        assert_eq!(row[2], (2.0 * std::f64::consts::PI * row[1]).sin());
    }
    // The Wright average damps the amplitude.
    let amp = rows[16..].iter().map(|r| r[2].abs()).fold(0.0, f64::max);
    assert!(amp < 1.0 && amp > 0.0);
}

#[test]
fn barrier_oracle_needs_a_config() {
    let out = fhj().args(["oracle", "--variant", "barrier"]).output().unwrap();
    assert_eq!(code(&out), i32::from(exit::CONFIG));
}

#[test]
fn thread_cap_is_validated() {
    let out = fhj()
        .env("FHJ_THREADS", "zero")
        .args([
            "specialfun-table",
            "--fn",
            "erfc",
            "--from",
            "0",
            "--to",
            "1",
            "--step",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), i32::from(exit::CONFIG));
    let out = fhj()
        .env("FHJ_THREADS", "2")
        .args([
            "specialfun-table",
            "--fn",
            "erfc",
            "--from",
            "0",
            "--to",
            "1",
            "--step",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}
