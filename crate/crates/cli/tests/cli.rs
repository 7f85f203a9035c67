use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfeedback"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("qfeedback-cli-{}-{name}", std::process::id()))
}

#[test]
fn steady_without_drive_is_ground_state() {
    let csv = stdout(&["steady", "--alpha", "0", "--J", "1"]);
    assert_eq!(csv.lines().next(), Some("row,col,re,im"));
    for row in rows(&csv) {
        let expected = if row[0] == "4" && row[1] == "4" {
            1.0
        } else {
            0.0
        };
        assert!((num(&row[2]) - expected).abs() < 1e-12, "{row:?}");
        assert!(num(&row[3]).abs() < 1e-12);
    }
}

#[test]
fn steady_analytic_deviation_is_reported() {
    let out = run(&["steady", "--alpha", "1", "--J", "1", "--analytic"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("row,col,re,im,re_analytic,im_analytic,abs_deviation\n"));
    assert!(rows(&csv).iter().all(|r| num(&r[6]) < 1e-10));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let reported: f64 = stderr.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(reported < 1e-10, "{stderr}");
}

#[test]
fn zero_lambda_matches_plain_run() {
    let plain = stdout(&["steady", "--alpha", "1", "--J", "1"]);
    let zero = stdout(&["steady", "--alpha", "1", "--J", "1", "--lambda", "0"]);
    assert_eq!(plain, zero);
    let fb = stdout(&["steady", "--alpha", "1", "--J", "1", "--lambda", "0.5"]);
    assert_ne!(plain, fb);
}

#[test]
fn analytic_with_feedback_is_usage_error() {
    let out = run(&["steady", "--lambda", "1", "--analytic"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_scan_shape_and_invariant() {
    let csv = stdout(&[
        "scan",
        "--alpha-range",
        "0.5:1:2",
        "--J-range",
        "0.5:1:2",
        "--coarse-points",
        "41",
    ]);
    assert_eq!(csv.lines().next(), Some("alpha,J,C0,Cfb,lambda_opt,delta"));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 4);
    // J varies fastest.
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (num(&r[0]), num(&r[1]))).collect();
    assert_eq!(keys, vec![(0.5, 0.5), (0.5, 1.0), (1.0, 0.5), (1.0, 1.0)]);
    for r in &rows {
        assert!(num(&r[5]) >= -1e-9);
        assert!((num(&r[3]) - num(&r[2]) - num(&r[5])).abs() < 1e-11);
    }
}

#[test]
fn scan_json_mirrors_csv() {
    let args = [
        "scan",
        "--alpha-range",
        "0.5:0.5:1",
        "--J-range",
        "0.5:1:2",
        "--coarse-points",
        "21",
    ];
    let csv = stdout(&args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    let arr = json.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    for (obj, row) in arr.iter().zip(rows(&csv)) {
        let keys: Vec<&str> = obj
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(keys.len(), 6);
        for (k, cell) in ["alpha", "J", "C0", "Cfb", "lambda_opt", "delta"]
            .iter()
            .zip(&row)
        {
            let v = obj[*k].as_f64().unwrap();
            assert!((v - num(cell)).abs() <= 1e-11 * v.abs().max(1e-3), "{k}");
        }
    }
}

#[test]
fn scan_output_file_is_deterministic() {
    let (a, b) = (temp("a.csv"), temp("b.csv"));
    for p in [&a, &b] {
        let out = run(&[
            "scan",
            "--alpha-range",
            "0.2:1:3",
            "--J-range",
            "0.1:2:3",
            "--coarse-points",
            "41",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let _ = (std::fs::remove_file(&a), std::fs::remove_file(&b));
    assert_eq!(x, y);
}

#[test]
fn closed_evolution_columns() {
    let csv = stdout(&[
        "evolve",
        "--alpha",
        "1",
        "--J",
        "1",
        "--tau",
        "8",
        "--samples",
        "50",
    ]);
    assert_eq!(
        csv.lines().next(),
        Some("tau,var_analytic,var_numeric,concurrence")
    );
    let rows = rows(&csv);
    assert_eq!(rows.len(), 50);
    assert_eq!(num(&rows[0][0]), 0.0);
    assert!((num(&rows[0][1]) - 2.0).abs() < 1e-12);
    assert!((num(&rows[0][2]) - 2.0).abs() < 1e-12);
    assert!(num(&rows[0][3]).abs() < 1e-12);
    for r in &rows {
        assert!((num(&r[1]) - num(&r[2])).abs() < 1e-10);
    }
    assert_eq!(num(&rows[49][0]), 8.0);
}

#[test]
fn closed_evolution_rejects_zero_eta() {
    let out = run(&["evolve", "--alpha", "0", "--J", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("η"));
}

#[test]
fn open_evolution_preserves_trace() {
    let csv = stdout(&[
        "evolve",
        "--mode",
        "open",
        "--alpha",
        "1",
        "--J",
        "0.5",
        "--lambda",
        "0.4",
        "--t-final",
        "10",
        "--dt",
        "0.01",
        "--samples",
        "21",
    ]);
    assert_eq!(csv.lines().next(), Some("t,trace,min_eig,concurrence"));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 21);
    for r in &rows {
        assert!((num(&r[1]) - 1.0).abs() < 1e-8);
        assert!(num(&r[2]) > -1e-8);
    }
}

#[test]
fn oversized_step_is_numeric_failure() {
    let out = run(&[
        "evolve",
        "--mode",
        "open",
        "--alpha",
        "3",
        "--J",
        "3",
        "--lambda",
        "4",
        "--t-final",
        "200",
        "--dt",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reduce dt"));
}

#[test]
fn concurrence_command() {
    let csv = stdout(&["concurrence", "--alpha", "1", "--J", "1"]);
    assert_eq!(csv.lines().next(), Some("alpha,J,lambda,tau,concurrence"));
    let c0 = num(&rows(&csv)[0][4]);
    let analytic = stdout(&["concurrence", "--alpha", "1", "--J", "1", "--analytic"]);
    assert!((num(&rows(&analytic)[0][4]) - c0).abs() < 1e-10);
    let closed = stdout(&["concurrence", "--alpha", "1", "--J", "1", "--tau", "0"]);
    assert!(num(&rows(&closed)[0][4]).abs() < 1e-12);
}

#[test]
fn validate_reports_every_check() {
    let out = run(&["validate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let checks: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
        .collect();
    assert!(checks.len() >= 8);
    assert!(checks
        .iter()
        .all(|l| l.starts_with("PASS") && l.contains("deviation") && l.contains("threshold")));
}

#[test]
fn config_file_with_flag_override() {
    let path = temp("run.conf");
    std::fs::write(&path, "# steady state\nalpha = 0\nJ = 2\nformat = json\n").unwrap();
    let from_file = stdout(&["steady", "--config", path.to_str().unwrap()]);
    let overridden = stdout(&[
        "steady",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    std::fs::write(&path, "gamma = 2\n").unwrap();
    let bad = run(&["steady", "--config", path.to_str().unwrap()]);
    let _ = std::fs::remove_file(&path);

    let json: serde_json::Value = serde_json::from_str(&from_file).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 16);
    assert!(overridden.starts_with("row,col,re,im\n"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["scan", "--alpha-range", "1:0:3"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["scan", "--J-range", "0:1:0"]).status.code(), Some(2));
    assert_eq!(run(&["steady", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn help_documents_exit_codes() {
    let help = stdout(&["--help"]);
    assert!(help.contains("Exit status"));
    assert!(help.contains("2  usage") && help.contains("3  numerical"));
}
