use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pok(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pok")).args(args).output().expect("spawn pok")
}

fn ok(args: &[&str]) -> String {
    let out = pok(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn json_rows(text: &str) -> Vec<serde_json::Map<String, Value>> {
    text.lines().map(|l| serde_json::from_str::<Value>(l).unwrap().as_object().unwrap().clone()).collect()
}

fn num(v: &str) -> f64 {
    v.parse().unwrap()
}

#[test]
fn poisson_pmf_rows() {
    let rows = csv_rows(&ok(&["pmf", "--k", "1", "--lambda", "1", "--n-max", "5"]));
    assert_eq!(rows.len(), 6);
    let mut fact = 1.0;
    for (n, r) in rows.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        assert_eq!(r[0].parse::<usize>().unwrap(), n);
        let want = (-1.0f64).exp() / fact;
        assert!((num(&r[1]) - want).abs() <= 1e-14 * want, "n = {n}: {}", &r[1]);
        assert!((num(&r[2]) - 1.0 / fact).abs() <= 1e-14 / fact);
    }
}

#[test]
fn k50_histogram_has_two_unit_peaks() {
    let rows = csv_rows(&ok(&["pmf", "--k", "50", "--lambda", "0.10194", "--n-max", "130"]));
    let h: Vec<f64> = rows.iter().map(|r| num(&r[2])).collect();
    assert_eq!(h.len(), 131);
    assert_eq!(h[0], 1.0);
    assert!((h[113] - 1.0).abs() < 0.01, "{}", h[113]);
    assert!(h[112] < h[113] && h[114] < h[113]);
    assert!(h[51] < h[50] && h[51] < h[52]);
}

#[test]
fn double_mode_rows() {
    let rows = csv_rows(&ok(&["double-mode", "--k-min", "2", "--k-max", "14"]));
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0].parse::<usize>().unwrap(), i + 2);
        assert_eq!(r[2].parse::<usize>().unwrap(), i + 2);
    }
    assert!((num(&rows[0][3]) - (3f64.sqrt() - 1.0)).abs() < 1e-10);
    let rows = csv_rows(&ok(&["double-mode", "--k-min", "38", "--k-max", "41"]));
    for r in &rows {
        let k: usize = r[0].parse().unwrap();
        assert_eq!(r[2].parse::<usize>().unwrap(), 2 * k - 3);
    }
}

#[test]
fn excluded_strings() {
    for (k, want) in [("9", "[1,8] [10,14] [19,20]"), ("29", "[1,53] [57,63]"), ("2", "[1,1] [3,3]")] {
        let rows = csv_rows(&ok(&["excluded", "--k", k]));
        assert_eq!(&rows[0][1], want, "k = {k}");
    }
}

#[test]
fn tables_layout() {
    let text = ok(&["tables"]);
    assert!(text.starts_with("table,k,interval_1,interval_2,interval_3\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 40);
    let count = |t: &str| rows.iter().filter(|r| &r[0] == t).count();
    assert_eq!((count("1"), count("2"), count("3"), count("4")), (13, 14, 9, 4));
    assert_eq!(rows[0].iter().collect::<Vec<_>>(), vec!["1", "2", "1", "3", ""]);
    let row = |k: &str| rows.iter().find(|r| &r[1] == k).unwrap().clone();
    assert_eq!(&row("28")[3], "[55,61]");
    assert_eq!(&row("35")[3], "[69,76]");
    assert_eq!(&row("41")[3], "[80,89]");
}

#[test]
fn synthetic_power_law_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.csv");
    let mut text = String::from("x,y\n");
    for x in [1.0f64, 2.0, 3.0, 5.0, 8.0, 13.0] {
        text.push_str(&format!("{x},{}\n", 0.5 * x.powi(3)));
    }
    std::fs::write(&path, text).unwrap();
    let rows = csv_rows(&ok(&["fit", "--input", path.to_str().unwrap(), "--model", "powerlaw"]));
    assert_eq!(&rows[0][0], "powerlaw");
    assert_eq!(format!("{:.4}", num(&rows[0][2])), "3.0000");
    assert!((num(&rows[0][1]) - 0.5).abs() < 1e-10);
}

#[test]
fn sweep_file_fits() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.json");
    let out = pok(&[
        "double-mode", "--k-min", "50", "--k-max", "1000", "--samples", "16", "--skip-ties",
        "--format", "json", "--out", sweep.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = sweep.to_str().unwrap();
    let lin = csv_rows(&ok(&["fit", "--input", s, "--model", "linear", "--x", "k", "--y", "mean_minus_mode"]));
    assert!((num(&lin[0][2]) - 0.38).abs() <= 0.05, "slope {}", &lin[0][2]);
    let pw = csv_rows(&ok(&["fit", "--input", s, "--model", "powerlaw", "--x", "k", "--y", "mean"]));
    assert!((num(&pw[0][2]) - 1.125).abs() <= 0.05, "exponent {}", &pw[0][2]);
}

#[test]
fn conjecture_checks() {
    let rows = json_rows(&ok(&["conjectures", "--k-min", "42", "--k-max", "60", "--format", "json"]));
    assert_eq!(rows.len(), 19);
    for r in &rows {
        assert_eq!(r["single_interval"], "pass");
        assert_eq!(r["passed"], true);
    }
    let rows = json_rows(&ok(&["conjectures", "--k-min", "2", "--k-max", "20", "--format", "json"]));
    assert!(rows.iter().all(|r| r["k_plus_one_excluded"] == true));
    let k4 = rows.iter().find(|r| r["k"] == 4).unwrap();
    assert_eq!(k4["single_interval"], "n/a");
}

#[test]
fn csv_and_json_agree() {
    let args = ["double-mode", "--k-min", "2", "--k-max", "20"];
    let csv_text = ok(&args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let json = json_rows(&ok(&json_args));
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), json.len());
    for (r, j) in rows.iter().zip(&json) {
        assert_eq!(j.keys().map(String::as_str).collect::<Vec<_>>(), headers.iter().collect::<Vec<_>>());
        for (h, v) in headers.iter().zip(r.iter()) {
            assert_eq!(num(v), j[h].as_f64().unwrap(), "column {h}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["double-mode", "--k-min", "2", "--k-max", "30"],
        vec!["breakpoints", "--k", "6", "--lambda-max", "1", "--format", "json"],
        vec!["stats", "--k", "3", "--lambda", "0.8"],
    ] {
        assert_eq!(pok(&args).stdout, pok(&args).stdout, "{args:?}");
    }
}

#[test]
fn out_flag_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roots.csv");
    let stdout = ok(&["root", "--k-min", "2", "--k-max", "6"]);
    ok(&["root", "--k-min", "2", "--k-max", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| pok(args).status.code();
    assert_eq!(code(&["root", "--k", "3"]), Some(0));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["pmf", "--k", "2", "--lambda", "0"]), Some(2));
    assert_eq!(code(&["pmf", "--k", "2", "--lambda", "-1"]), Some(2));
    assert_eq!(code(&["pmf", "--k", "0", "--lambda", "1"]), Some(2));
    assert_eq!(code(&["pmf", "--k", "2"]), Some(2));
    assert_eq!(code(&["tables", "--k", "50"]), Some(2));
    assert_eq!(code(&["stats", "--k", "2", "--lambda", "1", "--digits", "3"]), Some(2));
    let missing = Path::new("/nonexistent-dir/input.csv");
    assert_eq!(code(&["fit", "--input", missing.to_str().unwrap(), "--model", "linear"]), Some(1));
    // the two smallest unit roots at k = 819 are too close to order
    assert_eq!(code(&["double-mode", "--k", "819"]), Some(3));
    assert_eq!(code(&["double-mode", "--k", "819", "--skip-ties"]), Some(0));
}

#[test]
fn malformed_fit_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "x,y\n1,2\n2,abc\n3,4\n").unwrap();
    let out = pok(&["fit", "--input", path.to_str().unwrap(), "--model", "linear"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&path, "x,y\n1,2\n").unwrap();
    let out = pok(&["fit", "--input", path.to_str().unwrap(), "--model", "linear"]);
    assert_eq!(out.status.code(), Some(2));
}
