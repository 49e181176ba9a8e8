//! End-to-end runs of the `pe` binary.

use std::path::Path;
use std::process::{Command, Output};

fn pe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pe"))
        .args(args)
        .env("PE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(
        &path,
        format!("grid.dims = 2\ngrid.n = 16\ndt = 1e-2\nt_end = 0.2\nsnapshot_stride = 5\n{extra}"),
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn simulate_writes_traces_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let snaps = dir.path().join("snaps");
    let cfg = write_config(
        dir.path(),
        &format!(
            "record = s=-0.25,p=4,q=inf,axis=z,inner=LinfH\nsnapshot_dir = {}\n",
            snaps.display()
        ),
    );
    let out = dir.path().to_string_lossy().into_owned();
    let o = pe(&["simulate", "--config", &cfg, "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time,energy,dissipation,B-0.25_4_inf_z_LinfH"
    );
    assert_eq!(lines.count(), 5);

    let snap = snaps.join("snap_000020.tbsf");
    assert!(snap.exists());
    let o = pe(&[
        "norm",
        "--field",
        &snap.to_string_lossy(),
        "--spec",
        "s=-0.25,p=4,q=inf,axis=z,inner=LinfH",
    ]);
    assert_eq!(code(&o), 0);
    let printed: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    let last: f64 = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(printed, last);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let read = |sub: &str| {
        let out = dir.path().join(sub);
        assert_eq!(
            code(&pe(&[
                "energy-check",
                "--config",
                &cfg,
                "--tol",
                "1",
                "--out",
                &out.to_string_lossy()
            ])),
            0
        );
        std::fs::read(out.join("energy.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn flux_check_passes_and_writes_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let o = pe(&["flux-check", "--grid", "16", "--seed", "7", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("flux_breakdown.csv")).unwrap();
    assert!(csv.starts_with("j_min,j_max,J1,J2,J3,J4,J5,J6,direct_H,direct_z,mismatch"));
}

#[test]
fn mollify_check_on_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let o = pe(&[
        "mollify-check",
        "--grid",
        "64",
        "--n-list",
        "1,2,3,4",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(dir.path().join("commutators.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn uniqueness_dominates_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().to_string_lossy().into_owned();
    let o = pe(&[
        "uniqueness",
        "--config",
        &cfg,
        "--delta",
        "1e-6",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("gronwall.csv")).unwrap();
    assert!(csv.starts_with("t,lhs,envelope,C\n"));
    // a zero initial difference cannot bound a discretisation mismatch
    let o = pe(&[
        "uniqueness",
        "--config",
        &cfg,
        "--variant",
        "dealias",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn energy_check_fails_on_a_tight_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().to_string_lossy().into_owned();
    assert_eq!(
        code(&pe(&[
            "energy-check",
            "--config",
            &cfg,
            "--tol",
            "1e-30",
            "--out",
            &out
        ])),
        1
    );
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&pe(&[])), 2);
    assert_eq!(
        code(&pe(&["simulate", "--config", "/nonexistent/run.cfg"])),
        2
    );
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "grid.n = 12\n").unwrap();
    assert_eq!(
        code(&pe(&["simulate", "--config", &bad.to_string_lossy()])),
        2
    );
    assert_eq!(
        code(&pe(&[
            "norm",
            "--field",
            "/nonexistent.tbsf",
            "--spec",
            "s=0"
        ])),
        2
    );
    assert_eq!(code(&pe(&["flux-check", "--dims", "4"])), 2);
}

#[test]
fn proptest_sweeps_pass() {
    let o = pe(&["proptest", "--cases", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 6);
}
