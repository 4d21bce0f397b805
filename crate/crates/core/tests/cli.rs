use std::path::Path;
use std::process::{Command, Output};

use wbk_core::cli::{Format, Report};
use wbk_core::qfield::RationalFn;
use wbk_core::wbk::{Database, OpSymbol};

fn wbk(args: &[&str], db: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wbk"));
    cmd.args(args).env_remove("WBK_DB");
    if let Some(p) = db {
        cmd.env("WBK_DB", p);
    }
    cmd.output().expect("wbk runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bound_prints_scal_multiple() {
    let o = wbk(&["bound", "--k", "1", "--a", "2", "--b", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "scal/(2*(n+2))\n");
    let o = wbk(
        &["bound", "--k", "1", "--a", "2", "--b", "1", "--n", "3"],
        None,
    );
    assert_eq!(stdout(&o), "scal/10\n");
}

#[test]
fn derive_listing() {
    let o = wbk(&["derive", "eq1", "--symbolic"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        "B[-1,+2]: 1, B[-1,-1]: -(n-1), SCAL: -(n-1)/(8*n*(n+2))"
    );
    let o = wbk(&["derive", "wbf4", "--n", "2"], None);
    assert_eq!(o.status.code(), Some(3), "below n_min");
}

#[test]
fn full_verify_passes_and_is_deterministic() {
    let a = wbk(
        &["verify", "--all", "--n-range", "2:32", "--format", "json"],
        None,
    );
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    let report: Report = serde_json::from_slice(&a.stdout).unwrap();
    assert!(report.all_pass());
    assert!(!report.entries.is_empty());
    let ids: Vec<&str> = report.entries.iter().map(|e| e.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    assert_eq!(ids, sorted);
    let b = wbk(
        &["verify", "--all", "--n-range", "2:32", "--format", "json"],
        None,
    );
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn latex_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.tex");
    let o = wbk(
        &[
            "report",
            "--format",
            "latex",
            "--out",
            out.to_str().unwrap(),
            "--n-range",
            "2:8",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let tex = std::fs::read_to_string(&out).unwrap();
    assert!(tex.starts_with("\\documentclass"));
    assert!(tex.contains("0 & 2 & 0 & L20E & (n+1)/(2n(n+2)) scal"));
    assert!(tex.contains("\\section*{HE}"));
    assert!(tex.trim_end().ends_with("\\end{document}"));
}

#[test]
fn database_override() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let o = wbk(&["verify", "--all", "--format", "json"], Some(&empty));
    assert_eq!(o.status.code(), Some(0));
    let r: Report = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.entries.is_empty());

    let db = Database::builtin();
    let c = db.require("eq1").unwrap().expr.coeff(&OpSymbol::Scal);
    let broken = db
        .with_coefficient("eq1", OpSymbol::Scal, &c + &RationalFn::one())
        .unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, broken.to_json()).unwrap();
    let o = wbk(
        &["verify", "eq1", "--n-range", "2:4", "--format", "markdown"],
        Some(&path),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("| eq1 | fail |"));

    let missing = dir.path().join("missing.json");
    assert_eq!(
        wbk(&["verify", "--all"], Some(&missing)).status.code(),
        Some(3)
    );
}

#[test]
fn classify_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("gr2.json");
    // Gr2(C^5): lambda_min = lambda2 with eigenspace su(5)
    let text = r#"{"n": 3, "lambda_min_functions": {"exact": "1/6"},
                   "eigenvalue_dims": [{"lambda": "1/6", "dim": 24}],
                   "index_i1": 0, "iso_dim": 24}"#;
    std::fs::write(&input, text).unwrap();
    let o = wbk(&["classify", "--input", input.to_str().unwrap()], None);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["verdict"], "semistable-with-IED");
    assert_eq!(v["report"]["ied_dim"], 24);

    let o = wbk(&["classify", "--wolf", "--n-range", "2:6"], None);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rows.iter().any(|r| r["name"] == "G2/SO(4)"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(wbk(&[], None).status.code(), Some(2));
    assert_eq!(wbk(&["dim", "--n", "3"], None).status.code(), Some(2));
    assert_eq!(
        wbk(&["verify", "--n-range", "1:4"], None).status.code(),
        Some(2)
    );
    assert_eq!(wbk(&["classify"], None).status.code(), Some(2));
}

#[test]
fn edges_and_dims() {
    let o = wbk(&["edges", "--bundle", "HE"], None);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(text.contains("B[+1,-1]\tSym2H"));
    assert_eq!(
        stdout(&wbk(&["dim", "--bundle", "Sym2HSym2E", "--n", "2"], None)).trim(),
        "30"
    );
    assert_eq!(
        stdout(&wbk(&["dim", "--bundle", "L20E"], None)).trim(),
        "(n-1)*(2*n+1)"
    );
}

#[test]
fn solve_at_lambda2() {
    let o = wbk(
        &[
            "solve",
            "--bundle",
            "HE",
            "--assume",
            "B[+1,+2],B[+1,-1],B[-1,+1]",
            "--lambda",
            "lambda2",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("B[+1,+1] = 3*scal/(8*n*(n+2))"), "{text}");
    assert!(text.contains("q(R) check: pass"));
}

#[test]
fn markdown_and_json_formats() {
    let json = wbk(
        &[
            "verify",
            "eq3",
            "eq4",
            "--format",
            "json",
            "--n-range",
            "2:5",
        ],
        None,
    );
    let r: Report = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(r.format, Format::Json);
    assert_eq!(r.entries.len(), 2);
    assert!(r.bounds.is_empty());
}
