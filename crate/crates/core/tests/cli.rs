use std::path::Path;
use std::process::{Command, Output};

fn ipsf(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipsf"))
        .args(args)
        .env("IPSF_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn tables_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = ipsf(&["tables"], dir.path());
    let b = ipsf(&["tables", "--no-cache"], dir.path());
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("-20/9"));
    assert!(text.contains("9/16"));
}

#[test]
fn written_bundle_matches_cache_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bundle.txt");
    let out = ipsf(&["tables", "--write", file.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 0);
    let written = std::fs::read_to_string(&file).unwrap();
    assert!(written.starts_with("ipsf-tables v1\nsha256 "));
    let cached = std::fs::read_to_string(dir.path().join("tables-N4-m10.txt")).unwrap();
    assert_eq!(written, cached);
}

#[test]
fn odd_order_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ipsf(&["solve", "-N", "3", "-j", "3"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "level = 3\nbogus = 1\n").unwrap();
    let out = ipsf(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_config_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("absent.toml");
    let out = ipsf(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn solve_writes_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = ipsf(
        &[
            "solve",
            "-j",
            "4",
            "-n",
            "2",
            "--coeffs",
            "1,1,1",
            "-o",
            out_dir.to_str().unwrap(),
            "--wavefunctions",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: toml::Table = std::fs::read_to_string(out_dir.join("solve.toml"))
        .unwrap()
        .parse()
        .unwrap();
    let e0 = summary["energies"][0].as_float().unwrap();
    assert!((e0 - 1.6148941).abs() < 1e-6);
    let csv = std::fs::read_to_string(out_dir.join("psi_1.csv")).unwrap();
    assert!(csv.starts_with("# potential="));
    assert_eq!(csv.lines().nth(1), Some("x,psi"));
}

#[test]
fn coarse_comparison_reports_a_breach() {
    let dir = tempfile::tempdir().unwrap();
    let out = ipsf(&["compare", "--set", "exact", "-j", "4"], dir.path());
    assert_eq!(code(&out), 4);
}

#[test]
fn convergence_writes_differences() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("conv");
    let out = ipsf(
        &[
            "convergence",
            "--levels",
            "3..5",
            "-o",
            out_dir.to_str().unwrap(),
            "--workers",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
}
