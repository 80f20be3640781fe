use std::path::Path;
use std::process::{Command, Output};

fn volkov(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volkov"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn oscillatory_suite_passes_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = volkov(&["--suite", "oscillatory"], &out);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    for f in ["summary.txt", "config.toml", "s_integral.csv", "c_smeared.csv"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let header = std::fs::read_to_string(out.join("s_integral.csv")).unwrap();
    assert!(header.lines().count() > 1);
}

#[test]
fn negative_sigma_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[packet]\nsigma = -0.2\n");
    let res = volkov(&["--config", &cfg], &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("packet.sigma must be positive"));
}

#[test]
fn unknown_suite_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let res = volkov(&["--suite", "nonsense"], &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let res = volkov(&["--config", "/nonexistent/run.toml"], &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn eigen_suite_is_deterministic_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[eigen]\npairs = 4\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = volkov(&["--config", &cfg, "--suite", "eigen", "--seed", "7", "--threads", "2"], out);
        assert_eq!(res.status.code(), Some(0));
    }
    let read = |p: &Path| std::fs::read(p.join("eigen.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn zero_field_orthogonality_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[pulse]\nshape = \"zero\"\n\n[packet]\ntimes = [0.0]\n");
    let res = volkov(&["--config", &cfg, "--suite", "ortho"], &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
}

#[test]
fn unattainable_tolerance_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[oscillatory]\nc_tolerance = 1e-30\n");
    let res = volkov(&["--config", &cfg, "--suite", "oscillatory"], &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(1));
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("FAIL"));
}
