use std::path::Path;
use std::process::{Command, Output};

use nsch_core::scenario::ScenarioConfig;

fn nsch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsch-relax")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL_RUN: &str = "scenario = \"custom\"\nend_time = 0.02\nsnapshot_times = [0.01, 0.02]\n[grid]\nn = 200\n";

#[test]
fn run_writes_snapshots_log_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_RUN);
    let out = dir.path().join("out");
    let res = nsch(&["--quiet", "run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(res.stdout.is_empty());
    for f in ["snapshot_t0.01.csv", "snapshot_t0.02.csv", "log.csv", "summary.txt"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let snap = std::fs::read_to_string(out.join("snapshot_t0.02.csv")).unwrap();
    assert_eq!(snap.lines().next(), Some("x,p,u,c,v"));
    assert_eq!(snap.lines().count(), 201);
    let log = std::fs::read_to_string(out.join("log.csv")).unwrap();
    assert_eq!(log.lines().next(), Some("t,dt,energy,mass_c,smax,newton_iters,l2_c_omega"));
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_RUN);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert!(nsch(&["--quiet", "run", "--config", &config, "--out", out.to_str().unwrap()]).status.success());
    }
    for f in ["snapshot_t0.02.csv", "log.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn dump_omega_adds_a_column() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL_RUN.replace("[grid]", "[params]\nbeta = 0.5\n[grid]");
    let config = write_config(dir.path(), &body);
    let out = dir.path().join("out");
    let res = nsch(&["--quiet", "run", "--config", &config, "--out", out.to_str().unwrap(), "--dump-omega"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let snap = std::fs::read_to_string(out.join("snapshot_t0.02.csv")).unwrap();
    assert_eq!(snap.lines().next(), Some("x,p,u,c,v,omega"));
}

#[test]
fn sweep_makes_one_directory_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_RUN);
    let out = dir.path().join("sweep");
    let res = nsch(&["--quiet", "sweep", "--config", &config, "--axis", "alpha", "--values", "0.5,0.1", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(out.join("alpha_0.5/log.csv").exists());
    assert!(out.join("alpha_0.1/log.csv").exists());
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for (body, field) in [
        ("scenario = \"custom\"\n[params]\nalpha = -1.0\n", "params.alpha"),
        ("scenario = \"custom\"\nspeed = 3\n", "speed"),
        ("scenario = \"spinodal\"\n[grid]\nbc = \"non_reflecting\"\n", "grid.bc"),
    ] {
        let config = write_config(dir.path(), body);
        let res = nsch(&["run", "--config", &config]);
        assert_eq!(res.status.code(), Some(2), "{body}");
        let err = String::from_utf8_lossy(&res.stderr);
        assert!(err.contains(field), "{err}");
    }
    let res = nsch(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let res = nsch(&["sweep", "--config", &write_config(dir.path(), SMALL_RUN), "--axis", "colour", "--values", "1"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_with_3_and_keeps_the_last_state() {
    let dir = tempfile::tempdir().unwrap();
    let body = "scenario = \"ostwald\"\n[irk]\nrel_tol = 1e-12\nabs_tol = 1e-12\ndt_init = 0.004\ndt_min = 0.002\n";
    let config = write_config(dir.path(), body);
    let out = dir.path().join("out");
    let res = nsch(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(out.join("snapshot_failed_t0.0.csv").exists());
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("status = failed"));
}

#[test]
fn eigen_writes_the_sign_grid() {
    let res = nsch(&["eigen", "--preset", "fig4"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("lambda,param,sign"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1") || l.ends_with(",-1") || l.ends_with(",0")));

    let dir = tempfile::tempdir().unwrap();
    let res = nsch(&["--quiet", "eigen", "--preset", "rest-delta", "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success());
    assert!(dir.path().join("sign_grid_rest-delta.csv").exists());

    assert_eq!(nsch(&["eigen", "--preset", "nope"]).status.code(), Some(2));
}

#[test]
fn preset_output_parses_back() {
    for name in ["compression_riemann", "spinodal", "two_phase_shock_tube"] {
        let res = nsch(&["preset", name]);
        assert!(res.status.success());
        let text = String::from_utf8(res.stdout).unwrap();
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.scenario.name(), name);
    }
    assert_eq!(nsch(&["preset", "nope"]).status.code(), Some(2));
}
