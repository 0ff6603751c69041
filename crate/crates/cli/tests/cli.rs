use std::fs;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_special-reps")).args(args).output().unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

#[test]
fn lists_all_suites() {
    let o = cli(&["list-suites"]);
    assert!(o.status.success());
    let out = text(&o);
    for s in ["algebra", "cocycle", "overlap", "heisenberg", "poisson", "projective"] {
        assert!(out.lines().any(|l| l.starts_with(s)), "{out}");
    }
}

#[test]
fn validate_reports_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, "suite = \"poisson\"\nseed = 3\n").unwrap();
    let o = cli(&["validate", good.to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "suite = \"poisson\"\nseed = 3\nfock_degree = 1000\n").unwrap();
    let o = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("line 3: fock_degree"), "{}", text(&o));
}

#[test]
fn passing_run_writes_both_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["run", "algebra", "--seed", "9", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let csv = fs::read_to_string(dir.path().join("algebra.csv")).unwrap();
    assert!(csv.starts_with("id,kind,value,lower,upper,pass,detail\n"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("algebra.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 9);
    assert_eq!(json["pass"], true);
}

#[test]
fn failing_check_sets_exit_status_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("broken.json"),
        r#"{"name": "broken", "class": 2, "dims": [2, 1], "brackets": [[0, 1, [0, 0, 1]]]}"#,
    )
    .unwrap();
    let alg = format!("file:{}", dir.path().join("broken.json").display());
    let o = cli(&["run", "algebra", "--algebra", &alg, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    assert!(text(&o).contains("algebra.broken.antisymmetry"), "{}", text(&o));
}

#[test]
fn bad_overrides_are_invalid() {
    let o = cli(&["run", "cocycle", "--nodes", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("nodes"), "{}", text(&o));
    let o = cli(&["run", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("unknown suite"), "{}", text(&o));
}
