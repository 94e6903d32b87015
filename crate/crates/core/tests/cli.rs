use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jacobi-spectra"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("JACOBI_SPECTRA_THREADS").output().unwrap()
}

const FREE: &str = "tol = 1e-10\n[potential]\nkind = Constant\nvalue = 0\n";

#[test]
fn eigs_writes_closed_form_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FREE);
    let out = dir.path().join("eigs.csv");
    let res = run(&["eigs", "--config", cfg.to_str().unwrap(), "--set", "n=10", "--set", &format!("output={}", out.display())]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("# jacobi-spectra "));
    assert!(text.contains("# [potential]\n# kind = Constant\n"));
    let vals: Vec<f64> = text.lines().filter(|l| !l.starts_with('#')).map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals.len(), 10);
    for (i, v) in vals.iter().enumerate() {
        let exact = 2.0 * ((10 - i) as f64 * std::f64::consts::PI / 11.0).cos();
        assert!((v - exact).abs() <= 1e-10);
    }
    assert!(!text.contains('\r'));
}

#[test]
fn empty_schedule_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FREE);
    let res = run(&["cdf", "--config", cfg.to_str().unwrap(), "--set", "schedule="]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("`schedule`"));
}

#[test]
fn unknown_key_and_missing_file() {
    let res = run(&["cdf", "--set", "frobnicate=1"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("frobnicate"));
    let res = run(&["cdf", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn tolerance_below_roundoff_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FREE);
    let res = run(&["eigs", "--config", cfg.to_str().unwrap(), "--set", "n=8", "--set", "tol=1e-20"]);
    assert_eq!(res.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&res.stderr).contains("1e-20"));
}

#[test]
fn stdout_output_and_thread_env_do_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "schedule = 128, 256\ngrid_points = 101\nh = 0.05\n[potential]\nkind = CosineComposed\ncoeffs = 0, 2\ntheta = 1\n",
    );
    let outputs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|t| {
            let res = bin()
                .args(["spectrum", "--config", cfg.to_str().unwrap()])
                .env("JACOBI_SPECTRA_THREADS", t)
                .output()
                .unwrap();
            assert_eq!(res.status.code(), Some(0));
            res.stdout
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.contains("x,class,evidence,h,floor,cap\n"));
    assert!(text.contains("# claimed_nonperiodic = true"));
}

#[test]
fn butterfly_writes_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fly");
    let res = run(&[
        "butterfly",
        "--set", "potential.kind=CosineComposed",
        "--set", "potential.coeffs=0, 2",
        "--set", "potential.theta=1",
        "--set", "theta_points=4",
        "--set", "schedule=32, 64",
        "--set", "grid_points=51",
        "--set", &format!("output={}", out.display()),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let index = std::fs::read_to_string(out.join("index.csv")).unwrap();
    assert_eq!(index.lines().filter(|l| !l.starts_with('#')).count(), 5);
    for i in 0..4 {
        assert!(out.join(format!("theta_{i:04}.csv")).exists());
    }
}
