use std::path::Path;
use std::process::{Command, Output};

use dcsi::report::{MG_HEADER, SWEEP_HEADER};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim"))
        .args(args)
        .output()
        .expect("sim starts")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn preset_run_writes_sweep_and_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/fig1.csv");
    let o = sim(&["run", "fig1", "--out", path_str(&out), "--trials", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(SWEEP_HEADER));
    // 6 schemes × 15 SNR points
    assert_eq!(lines.clone().count(), 90);
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9, "{line}");
        assert_eq!(fields[1], "statistical");
        assert_eq!(fields[6], "200");
        assert_eq!(fields[8], "0");
    }

    let mg = std::fs::read_to_string(dir.path().join("nested/fig1_mg.csv")).unwrap();
    assert_eq!(mg.lines().next(), Some(MG_HEADER));
    assert_eq!(mg.lines().count(), 7);
}

#[test]
fn seed_changes_output_and_repeats_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = sim(&[
            "run",
            "fig2",
            "--out",
            path_str(&out),
            "--trials",
            "50",
            "--seed",
            seed,
        ]);
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "2");
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(!dir.path().join("a_mg.csv").exists());
}

#[test]
fn config_file_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(
        &cfg,
        "model = \"rvq\"\nschemes = [\"czf\", \"apzf\"]\nsnr_db = [10, 20]\ntrials = 20\ncodebooks = 3\n\n[quality]\nmode = \"bits\"\nvalues = [[4, 2], [2, 4]]\n",
    )
    .unwrap();
    let out = dir.path().join("small.csv");
    let o = sim(&["run", "--config", path_str(&cfg), "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("czf,rvq,10,"));
    assert!(rows[3].starts_with("apzf,rvq,20,"));
    // trials column counts every channel over all codebooks
    assert!(rows.iter().all(|r| r.split(',').nth(6) == Some("60")));
}

#[test]
fn bad_config_reports_line_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "trials = 10\n[quality]\nmode = \"alpha\"\nvalues = [[1.3, 0.5], [0, 0.7]]\n",
    )
    .unwrap();
    let out = dir.path().join("never.csv");
    let o = sim(&["run", "--config", path_str(&cfg), "--out", path_str(&out)]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("1.3"), "{err}");
    assert!(!out.exists());
}

#[test]
fn usage_errors() {
    let o = sim(&["run", "fig9", "--out", "x.csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("fig9"));

    let o = sim(&["run", "--out", "x.csv"]);
    assert!(!o.status.success());

    let o = sim(&["run", "fig1", "--out", "x.csv", "--threads", "many"]);
    assert!(!o.status.success());
}

#[test]
fn bounds_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bounds.csv");
    let o = sim(&["bounds", "--out", path_str(&out), "--samples", "20000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().next(), Some(dcsi::report::BOUNDS_HEADER));
    // 19 cdf points and 5 × 2 mean checks, for each of two laws
    assert_eq!(csv.lines().count(), 1 + 2 * (19 + 10));
    let uniform_fail = csv
        .lines()
        .filter(|l| l.starts_with("uniform_sphere") && l.contains(",false,"))
        .count();
    assert_eq!(uniform_fail, 0, "{csv}");
}

#[test]
fn thread_env_var_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_sim"))
        .args(["run", "fig2", "--out", path_str(&out), "--trials", "10"])
        .env("SIM_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
}
