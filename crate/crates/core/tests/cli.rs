use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn leeyang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leeyang"))
        .args(args)
        .output()
        .unwrap()
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV table: skips the `#` header line and the column row.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (columns, rows)
}

fn column(text: &str, name: &str) -> Vec<String> {
    let (cols, rows) = rows(text);
    let i = cols.iter().position(|c| c == name).unwrap();
    rows.into_iter().map(|r| r[i].clone()).collect()
}

fn numbers(text: &str, name: &str) -> Vec<f64> {
    column(text, name).iter().map(|s| s.parse().unwrap()).collect()
}

fn write_model(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn zeros_of_triangle_lie_on_circle() {
    let out = leeyang(&["zeros", &model("triangle.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# {"));
    let abs_q = numbers(&text, "abs_q");
    assert_eq!(abs_q.len(), 2);
    assert!(abs_q.iter().all(|r| (r - 1.0).abs() < 1e-10));
}

#[test]
fn zeros_of_antiferromagnet_are_real_negative() {
    let out = leeyang(&["zeros", &model("triangle_antiferro.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let re = numbers(&text, "re_q");
    let im = numbers(&text, "im_q");
    assert!(re.iter().all(|&x| x < 0.0));
    assert!(im.iter().all(|x| x.abs() < 1e-10));
    assert!((re[0] * re[1] - 1.0).abs() < 1e-10);
}

#[test]
fn tuned_triangle_zero_times() {
    let out = leeyang(&["zero-times", &model("triangle.toml"), "--n-windows", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let tau = numbers(&text, "tau");
    assert_eq!(tau.len(), 6);
    assert!((tau[0] - 0.486880958713).abs() < 1e-10);
    assert!((tau[1] - 1.083915368082).abs() < 1e-10);
    assert!(column(&text, "reachable").iter().all(|r| r == "true"));
    assert!(numbers(&text, "abs_C").iter().all(|r| *r < 1e-8));
}

#[test]
fn detuned_triangle_reports_unreachable() {
    let out = leeyang(&["zero-times", &model("triangle_detuned.toml")]);
    assert_eq!(out.status.code(), Some(5));
    let text = stdout(&out);
    assert!(column(&text, "reachable").iter().all(|r| r == "false"));
    assert!(numbers(&text, "required_h").iter().all(|h| (h + 1.0).abs() < 1e-10));
    assert!(!out.stderr.is_empty());
}

#[test]
fn verify_passes_on_examples() {
    for name in ["triangle.toml", "heisenberg_chain3.toml", "triangle_antiferro.toml"] {
        let out = leeyang(&["verify", &model(name), "--samples", "20"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
}

#[test]
fn parse_errors_exit_two() {
    assert_eq!(leeyang(&["zeros", &model("transverse.toml")]).status.code(), Some(2));
    assert_eq!(leeyang(&["zeros", "/nonexistent/model.toml"]).status.code(), Some(2));
    assert_eq!(leeyang(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn oversized_model_exits_four() {
    let dir = TempDir::new().unwrap();
    let big = write_model(
        &dir,
        "big.toml",
        "sites = 15\nkind = \"ising_zz\"\nfield_h = 0.0\nbeta = 1.0\n[probe]\nlambda = 1.0\nh0 = 0.0\n",
    );
    assert_eq!(leeyang(&["zeros", &big]).status.code(), Some(4));
    let medium = write_model(
        &dir,
        "medium.toml",
        "sites = 5\nkind = \"ising_zz\"\nfield_h = 0.0\nbeta = 1.0\n[probe]\nlambda = 1.0\nh0 = 0.0\n",
    );
    assert_eq!(leeyang(&["verify", &medium]).status.code(), Some(4));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = leeyang(&[
            "correlator",
            &model("heisenberg_chain3.toml"),
            "--points",
            "200",
            "--noise",
            "1e-3",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = leeyang(&["zeros", &model("triangle.toml"), "--format", "records"]);
    let again = leeyang(&["zeros", &model("triangle.toml"), "--format", "records"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn oracle_and_closed_form_tables_agree() {
    let closed = stdout(&leeyang(&["correlator", &model("triangle.toml"), "--points", "50"]));
    let oracle = stdout(&leeyang(&[
        "correlator",
        &model("triangle.toml"),
        "--points",
        "50",
        "--method",
        "oracle",
        "--t",
        "3.5",
    ]));
    for name in ["re_C", "im_C"] {
        for (a, b) in numbers(&closed, name).iter().zip(numbers(&oracle, name)) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn uncoupled_probe_gives_constant_column() {
    let dir = TempDir::new().unwrap();
    let path = write_model(
        &dir,
        "free.toml",
        "sites = 2\nkind = \"heisenberg\"\ncouplings = [[0, 1, 0.7]]\nfield_h = 0.3\nbeta = 0.8\n[probe]\nlambda = 0.0\nh0 = 0.0\n",
    );
    let out = leeyang(&["correlator", &path, "--points", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let abs = numbers(&text, "abs_C");
    assert!(abs.iter().all(|v| (v - 0.5).abs() < 1e-12));
    assert_eq!(leeyang(&["zero-times", &path]).status.code(), Some(2));
}

#[test]
fn records_format_is_json_lines() {
    let out = leeyang(&["zero-times", &model("triangle.toml"), "--format", "records", "--n-windows", "1"]);
    let text = stdout(&out);
    let records: Vec<serde_json::Value> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0]["reachable"], serde_json::Value::Bool(true));
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    assert!(header.is_object());
}
