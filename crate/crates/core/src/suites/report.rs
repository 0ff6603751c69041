use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::SuiteConfig;
use crate::error::{Error, Result};

/// Bumped whenever a column or field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Counts toward the exit status.
    Check,
    /// Reported for the record only.
    Info,
}

/// One row of a report: `pass` iff `lower <= value <= upper` for the bounds
/// present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub kind: CheckKind,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn within(id: impl Into<String>, value: f64, lower: Option<f64>, upper: Option<f64>, detail: impl Into<String>) -> Self {
        let pass = !value.is_nan()
            && lower.is_none_or(|l| value >= l)
            && upper.is_none_or(|u| value <= u);
        Self {
            id: id.into(),
            kind: CheckKind::Check,
            value,
            lower,
            upper,
            pass,
            detail: detail.into(),
        }
    }

    pub fn at_most(id: impl Into<String>, value: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self::within(id, value, None, Some(tol), detail)
    }

    pub fn at_least(id: impl Into<String>, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self::within(id, value, Some(bound), None, detail)
    }

    /// A yes/no property, recorded as 1 or 0 against the lower bound 1.
    pub fn flag(id: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self::within(id, if ok { 1.0 } else { 0.0 }, Some(1.0), None, detail)
    }

    pub fn info(id: impl Into<String>, value: f64, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: CheckKind::Info,
            value,
            lower: None,
            upper: None,
            pass: true,
            detail: detail.into(),
        }
    }

    /// A check that could not be evaluated.
    pub fn error(id: impl Into<String>, err: &Error) -> Self {
        Self {
            id: id.into(),
            kind: CheckKind::Check,
            value: f64::NAN,
            lower: None,
            upper: None,
            pass: false,
            detail: format!("error: {err}"),
        }
    }

    fn counts(&self) -> bool {
        self.kind == CheckKind::Check
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub checks_passed: usize,
    pub checks_failed: usize,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
}

impl Report {
    /// Sorts by id; duplicate ids are a bug in the suite.
    pub fn new(config: &SuiteConfig, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        debug_assert!(checks.windows(2).all(|w| w[0].id != w[1].id), "duplicate check id");
        let failed = checks.iter().filter(|c| c.counts() && !c.pass).count();
        let passed = checks.iter().filter(|c| c.counts() && c.pass).count();
        Self {
            schema_version: SCHEMA_VERSION,
            suite: config.suite.label().to_string(),
            seed: config.seed,
            pass: failed == 0,
            checks_passed: passed,
            checks_failed: failed,
            config: config.clone(),
            checks,
        }
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.counts() && !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Columns: `id,kind,value,lower,upper,pass,detail`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["id", "kind", "value", "lower", "upper", "pass", "detail"]).map_err(io)?;
        for c in &self.checks {
            let kind = match c.kind {
                CheckKind::Check => "check",
                CheckKind::Info => "info",
            };
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            w.write_record([
                c.id.as_str(),
                kind,
                &num(c.value),
                &opt(c.lower),
                &opt(c.upper),
                if c.pass { "true" } else { "false" },
                c.detail.as_str(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<suite>.csv` and `<suite>.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.suite));
        let json = dir.join(format!("{}.json", self.suite));
        std::fs::write(&csv, self.to_csv()?)?;
        std::fs::write(&json, self.to_json()?)?;
        Ok((csv, json))
    }
}

/// Shortest round-trip form in scientific notation.
fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}
