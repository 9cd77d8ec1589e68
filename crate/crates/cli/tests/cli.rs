use std::fs;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;

use qschur::qmat::read_qmatrix;
use qschur_cli::bench::CSV_HEADER;

const EXAMPLE: &str = "QMAT 2 2\n2 -1 -2 0\n-1 1 2 0\n2 -2 -2 0\n-1 2 2 0\n";

fn qschur() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qschur"))
}

fn write_example(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("example.qmat");
    fs::write(&p, EXAMPLE).unwrap();
    p
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn eigenvalues(v: &serde_json::Value) -> Vec<Complex64> {
    v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| Complex64::new(p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect()
}

#[test]
fn solve_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_example(dir.path());
    let out = dir.path().join("out");
    let st = qschur().args(["solve", "--input"]).arg(&input).arg("--out-dir").arg(&out).output().unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let s = summary(&out);
    assert_eq!(s["status"], "ok");
    let mut l = eigenvalues(&s);
    l.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert!((l[0] - Complex64::new(0.0, 1.0)).norm() <= 1e-13);
    assert!((l[1] - Complex64::new(1.0, 0.0)).norm() <= 1e-13);
    assert!(s["metrics"]["e3"].as_f64().unwrap() <= 1e-14);
    for f in ["T.qmat", "U.qmat", "X.qmat", "Lambda.qmat"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(read_qmatrix(out.join("T.qmat")).unwrap().is_upper_triangular());
}

#[test]
fn solve_reorder_swaps_the_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_example(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (d, extra) in [(&a, None), (&b, Some("0,1"))] {
        let mut cmd = qschur();
        cmd.args(["solve", "--eigvec", "off", "--input"]).arg(&input).arg("--out-dir").arg(d);
        if let Some(m) = extra {
            cmd.args(["--reorder", m]);
        }
        assert!(cmd.status().unwrap().success());
    }
    let (ta, tb) = (read_qmatrix(a.join("T.qmat")).unwrap(), read_qmatrix(b.join("T.qmat")).unwrap());
    assert_eq!(ta[(0, 0)], tb[(1, 1)]);
    assert_eq!(ta[(1, 1)], tb[(0, 0)]);
    assert_eq!(summary(&b)["permutation"], serde_json::json!([1, 0]));
    assert!(!b.join("X.qmat").exists());
}

#[test]
fn solve_nonconvergence_writes_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("h.qmat");
    qschur::qmat::write_qmatrix(&qschur::qmat::fullrand(12, 1).unwrap(), &input).unwrap();
    let out = dir.path().join("out");
    let st = qschur()
        .args(["solve", "--max-sweeps", "1", "--input"])
        .arg(&input)
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3));
    assert_eq!(summary(&out)["status"], "no_convergence");
    assert!(out.join("H.qmat").exists() && out.join("U.qmat").exists());
}

#[test]
fn solve_reports_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.qmat");
    fs::write(&input, "QMAT 2 2\n1 0 0 0\n").unwrap();
    let st = qschur().args(["solve", "--input"]).arg(&input).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&st.stderr).contains("parse error"));
    let input = write_example(dir.path());
    let st = qschur().args(["solve", "--reorder", "1,0,1", "--input"]).arg(&input).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn bench_grid_rows_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("rows.csv");
    let summary_path = dir.path().join("summary.json");
    let st = qschur()
        .args(["bench", "--class", "fullrand", "--sizes", "8,16", "--strategies", "qr,qr+aed", "--trials", "3", "--seed", "7", "--out"])
        .arg(&csv_path)
        .arg("--summary")
        .arg(&summary_path)
        .status()
        .unwrap();
    assert!(st.success());
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    for r in &rows {
        assert_eq!(&r[8] == "N/A", &r[0] == "qr");
        for col in [6, 7, 9, 10, 11] {
            r[col].parse::<f64>().unwrap();
        }
    }
    let seeds: Vec<&str> = rows[..3].iter().map(|r| &r[3]).collect();
    assert_eq!(seeds, ["7", "8", "9"]);
    let cells: serde_json::Value = serde_json::from_str(&fs::read_to_string(summary_path).unwrap()).unwrap();
    assert_eq!(cells.as_array().unwrap().len(), 4);
}

#[test]
fn bench_strategy_alias_and_na_column() {
    let st = qschur()
        .args(["bench", "--sizes", "5", "--strategy", "qr", "--trials", "1", "--eigvec", "off"])
        .output()
        .unwrap();
    assert!(st.status.success());
    let text = String::from_utf8(st.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[8], "N/A");
    assert_eq!(row[11], "N/A");
}

#[test]
fn bench_rejects_bad_flags() {
    for args in [
        vec!["bench", "--strategies", "fast"],
        vec!["bench", "--class", "dense"],
        vec!["bench", "--aed-window", "1"],
        vec!["bench", "--nibble", "150"],
        vec!["bench", "--trials", "0"],
    ] {
        let st = qschur().args(&args).output().unwrap();
        assert_eq!(st.status.code(), Some(2), "{args:?}");
    }
}
