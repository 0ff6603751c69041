use std::fs;

use special_reps::suites::{run_and_write, run_suite, CheckKind, Report, SuiteConfig, SuiteName};
use special_reps::Error;

fn config_error(r: Result<SuiteConfig, Error>) -> String {
    match r {
        Err(Error::Config(m)) => m,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn toml_syntax_error_names_line_and_column() {
    let msg = config_error(SuiteConfig::parse("suite = \"algebra\"\nseed = \n", true));
    assert!(msg.starts_with("line 2, column"), "{msg}");
}

#[test]
fn json_type_error_names_line() {
    let text = "{\n  \"suite\": \"poisson\",\n  \"seed\": \"many\"\n}";
    let msg = config_error(SuiteConfig::parse(text, false));
    assert!(msg.starts_with("line 3, column"), "{msg}");
}

#[test]
fn unknown_keys_are_rejected_with_position() {
    let msg = config_error(SuiteConfig::parse("suite = \"cocycle\"\n\nseeed = 4\n", true));
    assert!(msg.starts_with("line 3"), "{msg}");
    assert!(msg.contains("seeed"), "{msg}");
}

#[test]
fn out_of_range_values_name_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "suite = \"heisenberg\"\nseed = 1\nheis_n = 9\n").unwrap();
    let msg = config_error(SuiteConfig::load(&path));
    assert!(msg.contains("line 3: heis_n"), "{msg}");

    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"suite\": \"poisson\",\n  \"tolerances\": {\n    \"sampler_level\": 0.9\n  }\n}").unwrap();
    let msg = config_error(SuiteConfig::load(&path));
    assert!(msg.contains("line 4: sampler_level"), "{msg}");
}

#[test]
fn missing_algebra_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.toml");
    fs::write(&path, "suite = \"algebra\"\nalgebra = \"file:nowhere.json\"\n").unwrap();
    let msg = config_error(SuiteConfig::load(&path));
    assert!(msg.contains("line 2: algebra"), "{msg}");
}

#[test]
fn config_roundtrips_through_the_report() {
    let mut cfg = SuiteConfig::new(SuiteName::Algebra);
    cfg.seed = 17;
    let report = run_suite(&cfg).unwrap();
    let json = report.to_json().unwrap();
    let back: serde_json::Value = serde_json::from_str(&json).unwrap();
    let cfg_back: SuiteConfig = serde_json::from_value(back["config"].clone()).unwrap();
    assert_eq!(cfg_back.seed, 17);
    assert_eq!(cfg_back.tolerances, cfg.tolerances);
    assert_eq!(back["schema_version"], 1);
}

#[test]
fn builtin_algebras_pass() {
    let report = run_suite(&SuiteConfig::new(SuiteName::Algebra)).unwrap();
    assert!(report.pass, "{:?}", report.failures().collect::<Vec<_>>());
    for name in ["abelian3", "heisenberg2", "heisenberg3", "free3"] {
        for law in ["associativity", "identity", "inverse", "jacobi"] {
            let c = report.check(&format!("algebra.{name}.{law}")).unwrap();
            assert!(c.value <= 1e-12, "{}", c.id);
        }
    }
    assert_eq!(report.check("algebra.bch.class2_exact").unwrap().value, 0.0);
}

#[test]
fn corrupt_algebra_file_fails_antisymmetry_and_names_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    // [e0, e1] = e2 without the matching [e1, e0] = -e2.
    fs::write(
        dir.path().join("broken.json"),
        r#"{"name": "broken", "class": 2, "dims": [2, 1], "brackets": [[0, 1, [0, 0, 1]]]}"#,
    )
    .unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "suite = \"algebra\"\nalgebra = \"file:broken.json\"\n").unwrap();
    let cfg = SuiteConfig::load(&path).unwrap();
    let report = run_suite(&cfg).unwrap();
    assert!(!report.pass);
    let c = report.check("algebra.broken.antisymmetry").unwrap();
    assert!(!c.pass);
    assert!((c.value - 1.0).abs() < 1e-15, "{c:?}");
    assert!(c.detail.contains('0') && c.detail.contains('1'), "{}", c.detail);
    // Group-law rows are skipped when the table is not a Lie algebra.
    assert!(report.check("algebra.broken.associativity").is_none());
}

#[test]
fn poisson_names_exactly_one_convention() {
    let report = run_suite(&SuiteConfig::new(SuiteName::Poisson)).unwrap();
    let c = report.check("poisson.charfunc.passing_conventions").unwrap();
    assert!(c.pass, "{c:?}");
    assert_eq!(c.detail, "passing: charfunc");
    assert!(report.pass, "{:?}", report.failures().collect::<Vec<_>>());

    let mut cfg = SuiteConfig::new(SuiteName::Poisson);
    cfg.convention = special_reps::poisson::Convention::AsStated;
    let report = run_suite(&cfg).unwrap();
    assert!(report.check("poisson.charfunc.passing_conventions").unwrap().pass);
    assert!(!report.check("poisson.charfunc.configured_convention_passes").unwrap().pass);
}

#[test]
fn info_rows_never_fail() {
    let report = run_suite(&SuiteConfig::new(SuiteName::Cocycle)).unwrap();
    let infos: Vec<_> = report.checks.iter().filter(|c| c.kind == CheckKind::Info).collect();
    assert!(!infos.is_empty());
    assert!(infos.iter().all(|c| c.pass));
    assert!(report.pass, "{:?}", report.failures().collect::<Vec<_>>());
}

fn write_twice(suite: SuiteName) -> (Report, [Vec<u8>; 4]) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cfg = SuiteConfig::new(suite);
    cfg.out_dir = a.path().to_path_buf();
    let (report, csv1, json1) = run_and_write(&cfg).unwrap();
    cfg.out_dir = b.path().to_path_buf();
    let (_, csv2, json2) = run_and_write(&cfg).unwrap();
    let read = |p| fs::read(p).unwrap();
    (report, [read(csv1), read(json1), read(csv2), read(json2)])
}

#[test]
fn reports_are_byte_identical_across_reruns() {
    for suite in [SuiteName::Algebra, SuiteName::Projective] {
        let (report, [c1, j1, c2, j2]) = write_twice(suite);
        assert_eq!(c1, c2, "{suite} csv");
        assert_eq!(j1, j2, "{suite} json");
        let csv = String::from_utf8(c1).unwrap();
        assert_eq!(csv.lines().next(), Some("id,kind,value,lower,upper,pass,detail"));
        assert_eq!(csv.lines().count(), report.checks.len() + 1);
        let ids: Vec<&str> = report.checks.iter().map(|c| c.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }
}

#[test]
fn different_seeds_change_the_report() {
    let mut cfg = SuiteConfig::new(SuiteName::Projective);
    let a = run_suite(&cfg).unwrap().to_json().unwrap();
    cfg.seed += 1;
    let b = run_suite(&cfg).unwrap().to_json().unwrap();
    assert_ne!(a, b);
}
