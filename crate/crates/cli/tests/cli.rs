use std::process::{Command, Output};

fn lgpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgpoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn b_solve_near_zero_temperature() {
    let o = lgpoly(&["b-solve", "--s", "0.5", "--theta", "0.001"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let b = v["b"].as_f64().unwrap();
    assert!((b / 3.464_101_615 - 1.0).abs() < 1e-2, "{b}");
}

#[test]
fn rate_table_rows_are_positive() {
    let o = lgpoly(&[
        "rate-table",
        "--s-min",
        "0.2",
        "--s-max",
        "0.9",
        "--points",
        "8",
        "--theta",
        "0.3",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,theta,b,f,F,residual_H,refine_delta");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[4] > 0.0));
    assert_eq!(rows[0][0], 0.2);
    assert_eq!(rows[7][0], 0.9);
    // 17 significant digits
    assert!(text.lines().nth(1).unwrap().starts_with("2.0000000000000001e-1,"));
}

#[test]
fn usage_errors_exit_2_without_stdout() {
    for args in [
        &["b-solve", "--s", "0.5", "--theta", "0.1", "--bogus"][..],
        &["no-such-command"][..],
        &["b-solve", "--s", "0.5", "--theta", "2.0"][..],
        &["simulate", "--n", "0", "--theta", "0.5", "--samples", "10"][..],
        &["simulate", "--n", "4", "--theta", "-1", "--samples", "10"][..],
        &[
            "fredholm-laplace",
            "--u",
            "1",
            "--n",
            "2",
            "--theta",
            "0.3",
            "--line-c",
            "0.9",
        ][..],
        &["mp-check", "--y", "-1"][..],
    ] {
        let o = lgpoly(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_deterministic_and_thread_independent() {
    let args = [
        "simulate",
        "--n",
        "30",
        "--theta",
        "0.4",
        "--samples",
        "200",
        "--seed",
        "9",
    ];
    let a = lgpoly(&[&args[..], &["--threads", "1"]].concat());
    let b = lgpoly(&[&args[..], &["--threads", "3"]].concat());
    let c = lgpoly(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let q = ["fredholm-q", "--s", "0.5", "--n", "3", "--theta", "0.3", "--no-refine"];
    assert_eq!(
        lgpoly(&[&q[..], &["--threads", "1"]].concat()).stdout,
        lgpoly(&[&q[..], &["--threads", "4"]].concat()).stdout
    );
}

#[test]
fn fredholm_json_fields() {
    let o = lgpoly(&["fredholm-laplace", "--u", "1", "--n", "1", "--theta", "0.25"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["value_re", "value_im", "imag_residual", "refine_delta", "dims"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((v["value_re"].as_f64().unwrap() - (-2.0f64).exp()).abs() < 1e-10);
    let o = lgpoly(&[
        "fredholm-q",
        "--s",
        "0.5",
        "--n",
        "2",
        "--theta",
        "0.3",
        "--smoothed",
        "--route",
        "contour",
        "--no-refine",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["refine_delta"].is_null());
    assert!(v["value_re"].as_f64().unwrap() > 0.0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let o = lgpoly(&[
        "phase-grid",
        "--s",
        "1",
        "--nx",
        "5",
        "--ny",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("re,im,sign\n"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn verify_reports_and_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = lgpoly(&["verify", "--only", "1,6", "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("criterion 1: PASS") && text.contains("criterion 6: PASS"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    for key in ["criterion_id", "pass", "measured", "expected", "tolerance"] {
        assert!(arr[0].get(key).is_some(), "missing {key}");
    }
    // the ansatz-gap criterion is red, so verify must exit 1
    let o = lgpoly(&["verify", "--only", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("criterion 8: FAIL"));
}

#[test]
fn help_describes_formulas() {
    let o = lgpoly(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for cmd in [
        "rate-table",
        "b-solve",
        "phase-grid",
        "fredholm-laplace",
        "fredholm-q",
        "ansatz-gap",
        "simulate",
        "mc-laplace",
        "mp-check",
        "verify",
    ] {
        assert!(text.contains(cmd), "{cmd}");
    }
    let o = lgpoly(&["fredholm-laplace", "--help"]);
    assert!(stdout(&o).contains("W(z) = Γ(θ − z)ⁿ/Γ(θ + z)ⁿ"));
}
