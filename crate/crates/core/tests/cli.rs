use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "grid.n_points = 64\ntime.dtau = pi/200\n";

fn superrad(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superrad"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn simulate_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.cfg", SMALL);
    let out = superrad(
        dir.path(),
        &[
            "--config",
            "run.cfg",
            "--out",
            "res",
            "--sample-every",
            "20",
            "simulate",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("res/trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tau,N00,N11,Nm1m1,total,C01_abs,C01_arg,Cm10_abs,delta_phi01"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    // 200 steps sampled every 20 plus τ = 0
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows.last().unwrap()[0], std::f64::consts::PI);
    // condensate at norm 1 plus two one-atom seeds
    assert!((rows[0][4] - (1.0 + 2.0 / 2e5)).abs() < 1e-12);
    for r in &rows {
        assert!((r[4] - rows[0][4]).abs() < 1e-8);
    }
}

#[test]
fn unknown_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.cfg", "pump.phio = 1.0\n");
    let out = superrad(dir.path(), &["--config", "bad.cfg", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pump.phio"));
}

#[test]
fn out_of_range_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.cfg", "pump.phi0 = 9\n");
    let out = superrad(dir.path(), &["--config", "bad.cfg", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_and_unwritable_output_exit_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = superrad(dir.path(), &["--config", "absent.cfg", "simulate"]);
    assert_eq!(out.status.code(), Some(4));

    write(dir.path(), "run.cfg", SMALL);
    write(dir.path(), "blocker", "");
    let out = superrad(
        dir.path(),
        &["--config", "run.cfg", "--out", "blocker/sub", "simulate"],
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocker"));
}

#[test]
fn blowup_exits_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "hot.cfg",
        "grid.n_points = 64\npump.chi0 = 1e9\nseed.forward = 1000\nseed.backward = 1000\ntime.dtau = pi/100\n",
    );
    let out = superrad(dir.path(), &["--config", "hot.cfg", "simulate"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zero_seed_figure_has_no_scattering() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "f6.cfg",
        &format!("{SMALL}sweep.values = 0\nsweep.phi0_points = 8\n"),
    );
    let out = superrad(
        dir.path(),
        &[
            "--config",
            "f6.cfg",
            "--out",
            "figs",
            "--parallelism",
            "2",
            "figure",
            "fig6",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("figs/fig6.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let cols: Vec<&str> = r.split(',').collect();
        assert_eq!(cols[0], "seed");
        assert_eq!(cols[3].parse::<f64>().unwrap(), 0.0);
        assert_eq!(cols[4].parse::<f64>().unwrap(), 0.0);
    }
    for name in ["fig6_fit.txt", "fig6_curve.csv", "fig6.svg"] {
        assert!(dir.path().join("figs").join(name).exists(), "{name}");
    }
}

#[test]
fn sweep_command_and_mirror_flag() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.cfg",
        &format!("{SMALL}[sweep]\naxis = phi0\nphi0_points = 6\n"),
    );
    let plain = superrad(dir.path(), &["--config", "s.cfg", "--out", "a", "sweep"]);
    assert!(
        plain.status.success(),
        "{}",
        String::from_utf8_lossy(&plain.stderr)
    );
    let doubled = superrad(
        dir.path(),
        &[
            "--config",
            "s.cfg",
            "--out",
            "b",
            "--mirror-family",
            "sweep",
        ],
    );
    assert!(doubled.status.success());
    let col = |d: &str| -> Vec<f64> {
        std::fs::read_to_string(dir.path().join(d).join("sweep.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
            .collect()
    };
    let (a, b) = (col("a"), col("b"));
    assert_eq!(a.len(), 6);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(*y, 2.0 * x);
    }
    let report = std::fs::read_to_string(dir.path().join("a/sweep_fit.txt")).unwrap();
    for key in [
        "amplitude",
        "offset",
        "baseline",
        "quality",
        "maximizer",
        "minimizer",
    ] {
        assert!(
            report.lines().any(|l| l.starts_with(&format!("{key} = "))),
            "{key}"
        );
    }
}

#[test]
fn logistic_baseline_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = superrad(dir.path(), &["--out", "lg", "figure", "logistic_baseline"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("lg/logistic_baseline.csv")).unwrap();
    let proxy: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(proxy.len(), 16);
    for p in &proxy {
        assert!(((p - proxy[0]) / proxy[0]).abs() < 1e-12);
    }
}

#[test]
fn unknown_preset_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = superrad(dir.path(), &["figure", "fig9"]);
    assert_eq!(out.status.code(), Some(2));
}
