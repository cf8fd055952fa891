use std::path::PathBuf;
use std::process::{Command, Output};

fn lcsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

fn write_temp(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("lcsa-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn verify_catalog_passes() {
    let o = lcsa(&["verify-catalog"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = records(&o);
    assert!(recs.len() > 80);
    assert!(recs.iter().all(|r| r["status"] == "pass"));
}

#[test]
fn injected_fault_is_reported() {
    let o = lcsa(&["verify-catalog", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    let failed: Vec<_> = records(&o).into_iter().filter(|r| r["status"] == "fail").collect();
    assert_eq!(failed[0]["check"], "skew");
    assert_eq!(failed[0]["target"], "Vir");
    assert!(failed[0]["witness"].as_str().unwrap().starts_with("(L, L, L)"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lcsa(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(lcsa(&["ann", "--family", "Nope"]).status.code(), Some(2));
    assert_eq!(lcsa(&["aut", "--family", "A3", "--params", "phi3"]).status.code(), Some(2));
    assert_eq!(lcsa(&["check", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn check_file_reports_skew_witness() {
    let body = r#"{"basis": [{"name": "A", "parity": "even"}, {"name": "B", "parity": "even"}, {"name": "X", "parity": "odd"}],
                   "brackets": {"A,A": {"A": "d+2*l"}, "A,X": {"X": "d+3/2*l"}, "X,X": {"B": "l"}}}"#;
    let path = write_temp("skew.json", body);
    let o = lcsa(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let recs = records(&o);
    assert_eq!(recs[0]["check"], "skew");
    assert!(recs[0]["witness"].as_str().unwrap().starts_with("(X, X, B)"));
}

#[test]
fn check_file_with_parameters() {
    let body = r#"{"basis": [{"name": "L", "parity": "even"}], "params": ["c"],
                   "brackets": {"L,L": {"L": "d+2*l+c*l^3"}}}"#;
    let path = write_temp("vir.json", body);
    let o = lcsa(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let zero = lcsa(&["check", path.to_str().unwrap(), "--params", "c=0"]);
    assert_eq!(zero.status.code(), Some(0));
}

#[test]
fn parse_errors_name_the_location() {
    let body = r#"{"basis": [{"name": "L", "parity": "even"}], "brackets": {"L,L": {"L": "d+2*q"}}}"#;
    let path = write_temp("undeclared.json", body);
    let o = lcsa(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(r#"brackets["L,L"]["L"]"#) && err.contains('q'), "{err}");
}

#[test]
fn same_seed_same_stream() {
    let args = ["aut", "--family", "D1", "--params", "a=-1,b=0,q=(d+2*l)*d^2,alpha=1,beta=0", "--seed", "7", "--samples", "20"];
    let first = lcsa(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, lcsa(&args).stdout);
}

#[test]
fn shift_example() {
    let o = lcsa(&["solve", "shift", "--params", "a=0,b=0,alpha=1,beta=0", "--degree", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["detail"], "dim 1 over (f): [(d)]");
}

#[test]
fn parametric_shift_has_two_branches() {
    let o = lcsa(&["solve", "shift", "--degree", "6"]);
    let recs = records(&o);
    assert_eq!(recs.len(), 2);
    assert!(recs[1]["detail"].as_str().unwrap().contains("f = d + 2*beta"));
}

#[test]
fn annihilation_of_hvs() {
    let o = lcsa(&["ann", "--family", "HVS", "--level", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let checks: Vec<String> = records(&o).iter().map(|r| r["check"].as_str().unwrap().to_string()).collect();
    assert_eq!(checks, ["closed_form", "antisymmetry", "super_jacobi"]);
}

#[test]
fn module_probe_finds_witness() {
    let o = lcsa(&["modules", "--family", "V_Da", "--params", "delta=0,a=3", "--text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("reducible") && text.contains("witness: (d + 3)"), "{text}");
}

#[test]
fn series_reports_solvability() {
    let o = lcsa(&["series", "--family", "A3", "--params", "phi3=l"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    let get = |c: &str| recs.iter().find(|r| r["check"] == c).unwrap()["detail"].clone();
    assert_eq!(get("solvable"), "true");
    assert_eq!(get("nilpotent"), "false");
}

#[test]
fn derive_reproduces_type_b() {
    let o = lcsa(&["solve", "derive", "--params", "even=B"]);
    let details: Vec<String> = records(&o).iter().map(|r| r["detail"].as_str().unwrap().to_string()).collect();
    for fam in ["B0", "B1", "B2"] {
        assert!(details.iter().any(|d| d.contains(&format!("matches {fam}"))), "{details:?}");
    }
}
