use std::process::{Command, Output};

use serde_json::Value;

fn stackelberg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stackelberg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = stackelberg(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

/// Every JSON result equals the matching CSV row, field by field and at
/// full precision.
fn assert_parity(args: &[&str]) {
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let text = stdout(&csv_args);
    assert!(!text.contains('\r'));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let results = json(&json_args)["results"].as_array().unwrap().clone();
    assert_eq!(rows.len(), results.len());
    for (row, result) in rows.iter().zip(&results) {
        let object = result.as_object().unwrap();
        let mut columns: Vec<_> = header.iter().collect();
        columns.sort_unstable();
        assert_eq!(
            columns,
            object.keys().map(String::as_str).collect::<Vec<_>>()
        );
        for (column, cell) in header.iter().zip(row.iter()) {
            match &object[column] {
                Value::Number(n) => {
                    let parsed: f64 = cell.parse().unwrap();
                    assert_eq!(parsed.to_bits(), n.as_f64().unwrap().to_bits(), "{column}");
                }
                Value::Bool(b) => assert_eq!(cell, b.to_string(), "{column}"),
                Value::String(s) => assert_eq!(cell, s, "{column}"),
                other => panic!("{column}: unexpected {other}"),
            }
        }
    }
}

#[test]
fn solve_classical_reference_market() {
    let v = json(&[
        "solve",
        "--model",
        "classical",
        "--a",
        "10",
        "--c-high",
        "2",
        "--c-low",
        "4",
        "--theta",
        "0.5",
    ]);
    let r = &v["results"][0];
    assert_eq!(r["x_a"], 3.5);
    assert_eq!(r["u_a"], 6.125);
    assert_eq!(r["regime"], "interior");
    assert_eq!(r["mover"], "first");
    assert_eq!(v["config"]["model"], "classical");
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["meta"]["grid"].is_null());
}

#[test]
fn solve_lo_kiang_quantum_reports_invalid_past_the_bound() {
    let v = json(&["solve", "--model", "lokiang-quantum", "--gamma", "0.6"]);
    assert_eq!(v["results"][0]["valid"], false);
    let v = json(&["solve", "--model", "lokiang-quantum", "--gamma", "0.2"]);
    assert_eq!(v["results"][0]["valid"], true);
}

#[test]
fn solve_entangled_complete_information() {
    let v = json(&["solve", "--model", "entangled", "--theta", "0"]);
    let r = &v["results"][0];
    assert_eq!(r["u_a"], r["u_b"]);
}

#[test]
fn entangled_sweep_traces_the_advantage_curve() {
    let text = stdout(&[
        "sweep",
        "--model",
        "entangled",
        "--var",
        "theta",
        "--from",
        "0",
        "--to",
        "1",
        "--step",
        "0.001",
        "--format",
        "csv",
    ]);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    for column in ["theta", "u_a", "u_b", "advantage"] {
        assert!(header.iter().any(|h| h == column), "{column}");
    }
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (theta, advantage) = (col("theta"), col("advantage"));
    let points: Vec<(f64, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[theta].parse().unwrap(), r[advantage].parse().unwrap())
        })
        .collect();
    assert_eq!(points.len(), 1001);
    // Rows come back in sweep order.
    assert!(points.windows(2).all(|w| w[0].0 < w[1].0));
    assert_eq!(points[0].1, 0.0);
    assert_eq!(points[1000].1, 0.0);
    let peak = points.iter().copied().fold(
        (0.0, f64::NEG_INFINITY),
        |a, p| if p.1 > a.1 { p } else { a },
    );
    assert!((peak.0 - 1.0 / 3.0).abs() <= 0.001, "{peak:?}");
    // k_H - k_L = 2 here.
    assert!((peak.1 - 4.0 / 27.0).abs() < 1e-6);
}

#[test]
fn cournot_gamma_sweep_falls_from_a_third_toward_a_quarter() {
    let v = json(&[
        "sweep",
        "--model",
        "cournot",
        "--mode",
        "normalized",
        "--var",
        "gamma",
        "--from",
        "0",
        "--to",
        "5",
        "--step",
        "0.5",
        "--cost",
        "1",
    ]);
    let outputs: Vec<f64> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["output"].as_f64().unwrap())
        .collect();
    assert_eq!(outputs.len(), 11);
    assert_eq!(outputs[0], 3.0);
    assert!(outputs.windows(2).all(|w| w[1] < w[0]));
    assert!(outputs[10] > 9.0 / 4.0 && outputs[10] - 9.0 / 4.0 < 1e-3);
}

#[test]
fn verify_exit_codes() {
    for model in ["classical", "entangled"] {
        let out = stackelberg(&["verify", "--model", model]);
        assert_eq!(out.status.code(), Some(0), "{model}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["results"][0]["passed"], true);
        assert_eq!(v["meta"]["grid"]["step"], 0.001);
    }
    let out = stackelberg(&["verify", "--model", "lokiang-quantum", "--gamma", "0.6"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["passed"], false);
    assert!(v["results"][0]["worst_deviation"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        &["solve", "--theta", "1.5"][..],
        &["solve", "--c-high", "5", "--c-low", "4"],
        &["sweep", "--from", "1", "--to", "0"],
        &["sweep", "--step", "-0.1"],
        &["explore"],
        &["solve", "--model", "quantum"],
        &["solve", "--config", "/nonexistent/run.toml"],
    ] {
        let out = stackelberg(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = stackelberg(&["solve", "--a", "-1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("a > 0"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &[
            "sweep",
            "--model",
            "classical",
            "--step",
            "0.01",
            "--format",
            "csv",
        ][..],
        &[
            "sweep",
            "--model",
            "lokiang-quantum",
            "--var",
            "gamma",
            "--step",
            "0.05",
        ],
        &["explore", "--gammas", "0,0.3", "--grid-step", "0.01"],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn csv_and_json_agree() {
    assert_parity(&["solve", "--model", "classical", "--theta", "0.3"]);
    assert_parity(&[
        "sweep",
        "--model",
        "classical",
        "--step",
        "0.05",
        "--c-low",
        "7",
    ]);
    assert_parity(&["sweep", "--model", "lokiang-classical", "--step", "0.1"]);
    assert_parity(&[
        "sweep",
        "--model",
        "lokiang-quantum",
        "--var",
        "gamma",
        "--to",
        "1",
        "--step",
        "0.1",
    ]);
    assert_parity(&["sweep", "--model", "entangled", "--step", "0.1"]);
    assert_parity(&["sweep", "--model", "cournot", "--step", "0.25"]);
    assert_parity(&[
        "verify",
        "--model",
        "classical",
        "--grid-step",
        "0.01",
        "--epsilon",
        "0.05",
    ]);
    assert_parity(&["explore", "--gammas", "0.1,0.5", "--grid-step", "0.01"]);
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "model = \"entangled\"\na = 10\nc-high-margin = 2\nc-low-margin = 4\ntheta = 0.25\nformat = \"csv\"\n",
    )
    .unwrap();
    let output = dir.path().join("out.csv");
    let config = config.to_str().unwrap();
    let out = stackelberg(&[
        "solve",
        "--config",
        config,
        "--theta",
        "0.5",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&output).unwrap();
    assert!(written.starts_with("theta,"));
    assert!(written.contains("\n0.5,10,2,4,3.5,0.5,0,"), "{written}");
}

#[test]
fn explore_starts_from_the_classical_solution() {
    let v = json(&["explore", "--gammas", "0", "--grid-step", "0.001"]);
    let r = &v["results"][0];
    assert!((r["x_a"].as_f64().unwrap() - 3.5).abs() <= 0.002);
    assert_eq!(r["lokiang_valid"], true);
    assert!(r["distance"].as_f64().unwrap() <= 0.002);
}
