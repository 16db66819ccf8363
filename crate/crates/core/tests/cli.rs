use std::path::Path;
use std::process::{Command, Output};

fn atxy(args: &[&str], out: &Path) -> Output {
    let dir = format!("out_dir={}", out.display());
    Command::new(env!("CARGO_BIN_EXE_atxy"))
        .args(args)
        .arg(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn phase_writes_csv_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = atxy(&["phase", "lambda1=lin:-1:1:3", "lambda2=0.5"], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(tmp.path().join("phase.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("gamma,lambda1,lambda2,phase"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "8.00000000000e-1");
    assert_eq!(csv.lines().count(), 4);
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("phase.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "phase");
}

#[test]
fn config_file_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, "# fields\ngamma = 0.5\nlambda2 = 0\nname = cold\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_atxy"))
        .args(["fs", "--config"])
        .arg(&cfg)
        .args(["lambda2=1", &format!("out_dir={}", tmp.path().display())])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(tmp.path().join("cold.csv")).unwrap();
    assert!(csv.starts_with("gamma,lambda1,lambda2,phase,beta_s,ln\n"));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "1.00000000000e0");
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["phase", "colour=blue"][..],
        &["phase", "gamma"][..],
        &["open-run", "size=7"][..],
        &["thermal-sweep", "epsilon=-1"][..],
    ] {
        let out = atxy(args, tmp.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn integrity_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    // every spectrum of a 4-site state violates "all eigenvalues ≥ 1"
    let out = atxy(
        &[
            "open-run",
            "size=4",
            "lambda1=1",
            "t_final=0.1",
            "min_eig_tol=-1",
        ],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
