//! End-to-end tests of the `verify` binary: exit codes, report files and
//! the checks listing.

use std::process::Command;

fn verify() -> Command {
    Command::new(env!("CARGO_BIN_EXE_verify"))
}

#[test]
fn passing_suite_exits_zero() {
    let out = verify()
        .args(["s3", "--samples", "20", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("s3-gks-residual"));
    assert!(text.contains("passed"));
}

#[test]
fn failing_check_exits_one() {
    // An unreachable tolerance forces a failure.
    let out = verify()
        .args(["dim2", "--samples", "5", "--tol", "dim2-det=1e-30"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fail"));
}

#[test]
fn dimension_mismatch_exits_two() {
    let out = verify()
        .args(["dim4", "--model", "s3-gks"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn unknown_suite_exits_two() {
    let out = verify().args(["fourier"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_model_exits_two() {
    let out = verify()
        .args(["identities", "--model", "killing:torus:+", "--samples", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_tolerance_id_exits_two() {
    let out = verify()
        .args(["dim2", "--samples", "5", "--tol", "zeta-function=1e-3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_flag_writes_json() {
    let path = std::env::temp_dir().join("spingeo-cli-report.json");
    let _ = std::fs::remove_file(&path);
    let out = verify()
        .args(["dim2", "--samples", "5", "--report", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.contains("\"suite\": \"dim2\""));
    assert!(body.contains("\"conventions\""));
    assert!(body.contains("\"verdict\""));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn env_var_sets_default_report_directory() {
    let dir = std::env::temp_dir().join("spingeo-report-dir-test");
    let _ = std::fs::remove_dir_all(&dir);
    let out = verify()
        .args(["dim2", "--samples", "5"])
        .env("SPINGEO_REPORT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let body = std::fs::read_to_string(dir.join("dim2.json")).unwrap();
    assert!(body.contains("\"suite\": \"dim2\""));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn list_checks_prints_registry() {
    let out = verify().args(["list-checks"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().count() >= 25);
    assert!(text.contains("three2"));
    assert!(text.contains("denotes the divergence of A"));
    assert!(text.contains("nxi"));
    assert!(text.contains("thus ξ is a Killing vector field"));
}
