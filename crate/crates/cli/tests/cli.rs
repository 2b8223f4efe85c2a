use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use l2plus::{fixtures, StateSpace};

fn l2plus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l2plus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_system(dir: &Path, name: &str, ss: &StateSpace) -> PathBuf {
    let path = dir.join(name);
    ss.write_json(&path).unwrap();
    path
}

#[test]
fn hinf_of_lag_prints_six_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let lag = write_system(dir.path(), "lag.json", &fixtures::first_order_lag());
    let out = l2plus(&["hinf", "--system", lag.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "1.000000");
}

#[test]
fn analyze_prints_one_bound() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write_system(dir.path(), "s61.json", &fixtures::sec6_1());
    let out = l2plus(&[
        "analyze",
        "--system",
        sys.to_str().unwrap(),
        "--alpha",
        "-1.4",
        "--degree",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    // the single-input column is flat up to N = 6, then drops
    let gamma: f64 = stdout(&out).trim().parse().unwrap();
    assert!(gamma < 0.5033 - 1e-2 && gamma > 0.3914, "{gamma}");

    let json = l2plus(&[
        "analyze",
        "--system",
        sys.to_str().unwrap(),
        "--alpha=-1.4",
        "--degree",
        "10",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["status"], "optimal");
    assert!((v["gamma"].as_f64().unwrap() - gamma).abs() < 1e-6);
}

#[test]
fn reproduce_single_input_benchmark_passes() {
    let out = l2plus(&["reproduce", "sec6-1"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("0.5033"), "{text}");
    assert!(text.contains("0.3914"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    assert_eq!(text.matches("PASS").count(), 4, "{text}");
}

#[test]
fn reproduce_two_input_benchmark_reports_norm_mismatch() {
    // The fixture matrices give 0.669542, not the reference 0.6995; the
    // bounds themselves reproduce.
    let out = l2plus(&["reproduce", "sec6-2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    let by_name = |q: &str| rows.iter().find(|r| r["quantity"] == q).unwrap();
    assert_eq!(by_name("hinf")["pass"], false);
    assert!((by_name("hinf")["computed"].as_f64().unwrap() - 0.669542).abs() < 1e-5);
    assert_eq!(by_name("bound N=0")["pass"], true);
    assert_eq!(by_name("bound alpha=-1.4 N=15")["pass"], true);
}

#[test]
fn smallgain_certifies_scaled_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write_system(
        dir.path(),
        "s62.json",
        &fixtures::sec6_2().scale_output(1.0 / 0.6),
    );
    let out = l2plus(&[
        "smallgain",
        "--system",
        sys.to_str().unwrap(),
        "--alpha",
        "-1.4",
        "--degree",
        "15",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["method"], "L2Plus");
    assert!(v["hinf"].as_f64().unwrap() > 1.0);
    assert!((v["bound"].as_f64().unwrap() - 0.498086 / 0.6).abs() < 1e-4);
}

#[test]
fn sweep_csv_columns_are_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write_system(dir.path(), "s62.json", &fixtures::sec6_2());
    let csv = dir.path().join("r.csv");
    let out = l2plus(&[
        "sweep",
        "--system",
        sys.to_str().unwrap(),
        "--alpha",
        "-1",
        "--alpha",
        "-1.2",
        "--alpha",
        "-1.4",
        "--max-degree",
        "15",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}{}",
        stdout(&out),
        stderr(&out)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,N,gamma,status,gap,seconds"));
    let rows: Vec<(f64, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[3], "optimal", "{l}");
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 3 * 16);
    for alpha in [-1.0, -1.2, -1.4] {
        let col: Vec<f64> = rows.iter().filter(|r| r.0 == alpha).map(|r| r.2).collect();
        assert_eq!(col.len(), 16);
        for w in col.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "alpha {alpha}: {col:?}");
        }
    }
}

#[test]
fn sweep_json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write_system(dir.path(), "lag.json", &fixtures::first_order_lag());
    let out_path = dir.path().join("r.json");
    let out = l2plus(&[
        "sweep",
        "--system",
        sys.to_str().unwrap(),
        "--alpha",
        "-1",
        "--max-degree",
        "2",
        "--seed",
        "7",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report =
        l2plus::bounds::BoundReport::from_json(&std::fs::read_to_string(&out_path).unwrap())
            .unwrap();
    assert_eq!(report.system, "lag");
    assert_eq!(report.rows.len(), 3);
    assert_eq!(report.lower_bound.as_ref().unwrap().seed, 7);
    assert_eq!(report.sandwich, Some(true));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["hinf"][..],
        &["hinf", "--system", "x.json", "--bogus"],
        &["frobnicate"],
        &["sweep", "--system", "x.json", "--max-degree", "2"],
        &[
            "sweep",
            "--system",
            "x.json",
            "--alpha",
            "-1",
            "--max-degree",
            "-2",
        ],
        &["hinf", "--system", "x.json", "--tol", "0"],
        &[
            "sweep",
            "--system",
            "x.json",
            "--alpha",
            "-1",
            "--max-degree",
            "1",
            "--format",
            "xml",
        ],
        &["reproduce", "sec7"],
    ] {
        let out = l2plus(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(l2plus(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_one_and_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = l2plus(&["hinf", "--system", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing.json"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"A": [[-1]], "B": [[1]], "C": [[1]]}"#).unwrap();
    let out = l2plus(&["hinf", "--system", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`D`"), "{}", stderr(&out));

    let dims = dir.path().join("dims.json");
    std::fs::write(
        &dims,
        r#"{"A": [[-1]], "B": [[1, 0]], "C": [[1]], "D": [[0]]}"#,
    )
    .unwrap();
    let out = l2plus(&["hinf", "--system", dims.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("D"), "{}", stderr(&out));

    let unstable = StateSpace::from_rows(&[&[0.5]], &[&[1.0]], &[&[1.0]], &[&[0.0]]).unwrap();
    let path = write_system(dir.path(), "unstable.json", &unstable);
    for cmd in ["hinf", "analyze", "smallgain"] {
        let out = l2plus(&[cmd, "--system", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{cmd}");
        assert!(stderr(&out).contains("Hurwitz"), "{cmd}: {}", stderr(&out));
    }

    let lag = write_system(dir.path(), "lag.json", &fixtures::first_order_lag());
    let out = l2plus(&[
        "analyze",
        "--system",
        lag.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--degree",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
