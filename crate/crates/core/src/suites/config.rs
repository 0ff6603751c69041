use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::canonical::{RadialGrid, RadialMeasure, RadialProfile};
use crate::error::{Error, Result};
use crate::lie_core::AlgebraFile;
use crate::poisson::Convention;
use crate::Algebra;

/// The named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Algebra,
    Cocycle,
    Overlap,
    Heisenberg,
    Poisson,
    Projective,
}

impl SuiteName {
    pub const ALL: [SuiteName; 6] = [
        SuiteName::Algebra,
        SuiteName::Cocycle,
        SuiteName::Overlap,
        SuiteName::Heisenberg,
        SuiteName::Poisson,
        SuiteName::Projective,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SuiteName::Algebra => "algebra",
            SuiteName::Cocycle => "cocycle",
            SuiteName::Overlap => "overlap",
            SuiteName::Heisenberg => "heisenberg",
            SuiteName::Poisson => "poisson",
            SuiteName::Projective => "projective",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            SuiteName::Algebra => "structure constants, group law, dilations and exact class-2 BCH",
            SuiteName::Cocycle => "cocycle identities of the canonical families and cohomology reduction",
            SuiteName::Overlap => "translation overlaps of Gaussian vectors and their small-r exponent",
            SuiteName::Heisenberg => "Fock truncation, coherent transport, U(n,1) embedding and multipliers",
            SuiteName::Poisson => "configuration sampler, characteristic functional and Radon-Nikodym factor",
            SuiteName::Projective => "multiplier cocycle and projective relation of the current operators",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`; expected one of {}", Self::names())))
    }

    fn names() -> String {
        Self::ALL.map(|n| n.label()).join(", ")
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Algebra selection: `abelian:<d>`, `heisenberg:<n>`, `free:<class>` or
/// `file:<path>` (relative paths resolve against the config file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlgebraSpec {
    Abelian(usize),
    Heisenberg(usize),
    Free(usize),
    File(PathBuf),
}

impl TryFrom<String> for AlgebraSpec {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("algebra `{s}` is not of the form kind:argument"))?;
        if kind == "file" {
            return Ok(AlgebraSpec::File(PathBuf::from(arg)));
        }
        let k: usize = arg
            .parse()
            .map_err(|_| format!("algebra `{s}`: `{arg}` is not a non-negative integer"))?;
        match kind {
            "abelian" => Ok(AlgebraSpec::Abelian(k)),
            "heisenberg" => Ok(AlgebraSpec::Heisenberg(k)),
            "free" => Ok(AlgebraSpec::Free(k)),
            _ => Err(format!("algebra kind `{kind}` unknown; expected abelian, heisenberg, free or file")),
        }
    }
}

impl From<AlgebraSpec> for String {
    fn from(a: AlgebraSpec) -> String {
        a.to_string()
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraSpec::Abelian(d) => write!(f, "abelian:{d}"),
            AlgebraSpec::Heisenberg(n) => write!(f, "heisenberg:{n}"),
            AlgebraSpec::Free(c) => write!(f, "free:{c}"),
            AlgebraSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl AlgebraSpec {
    /// Returns the algebra and its report name. File algebras are built
    /// without validation so that the suite can report diagnostics.
    pub fn build(&self) -> Result<(String, Algebra)> {
        let alg = match self {
            AlgebraSpec::Abelian(d) => Algebra::abelian(*d)?,
            AlgebraSpec::Heisenberg(n) => Algebra::heisenberg(*n)?,
            AlgebraSpec::Free(c) => Algebra::free_nilpotent(*c)?,
            AlgebraSpec::File(p) => {
                let file = AlgebraFile::load(p)
                    .map_err(|e| Error::Config(format!("algebra file {}: {e}", p.display())))?;
                let name = file.name.clone().unwrap_or_else(|| stem(p));
                return Ok((name, file.build()?));
            }
        };
        Ok((self.to_string().replace(':', ""), alg))
    }
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
    /// `quadratic`, `linear`, `const:<c>`, `power:<c>:<p>` or `custom:<expr>`.
    pub u: String,
}

impl Default for GridSpec {
    fn default() -> Self {
        let g = RadialGrid::standard();
        Self {
            r_min: g.r_min(),
            r_max: g.r_max(),
            nodes: g.len(),
            u: "quadratic".into(),
        }
    }
}

impl GridSpec {
    pub fn measure(&self) -> Result<RadialMeasure> {
        RadialMeasure::new(RadialGrid::new(self.r_min, self.r_max, self.nodes)?, RadialProfile::parse(&self.u)?)
    }
}

/// Radial windows of the Poisson base space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowSpec {
    /// Window for the characteristic functional battery.
    pub charfunc: [f64; 2],
    /// Window for the Radon-Nikodym check; must hold the transported mass.
    pub rn: [f64; 2],
    /// Window for Monte Carlo inner products of coherent product states.
    pub states: [f64; 2],
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            charfunc: [(-4.0f64).exp(), 1.0],
            rn: [(-6.0f64).exp(), 2.0f64.exp()],
            states: [(-3.0f64).exp(), 1.0],
        }
    }
}

/// Every tolerance a report can cite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub group_law: f64,
    pub abelian_overlap: f64,
    pub exponent_band: [f64; 2],
    pub sigmas: f64,
    pub cocycle: f64,
    pub cohomology: f64,
    pub fock_epsilon: f64,
    pub two_path: f64,
    pub unitary: f64,
    pub rho: f64,
    pub projective: f64,
    pub sampler_level: f64,
    pub leakage: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            group_law: 1e-12,
            abelian_overlap: 1e-12,
            exponent_band: [1.9, 2.1],
            sigmas: 3.0,
            cocycle: 1e-10,
            cohomology: 1e-8,
            fock_epsilon: 1e-6,
            two_path: 1e-9,
            unitary: 1e-10,
            rho: 1e-8,
            projective: 1e-7,
            sampler_level: 0.01,
            leakage: crate::poisson::LEAKAGE_BOUND,
        }
    }
}

/// A single suite run. Reports are a pure function of this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: SuiteName,
    /// Algebra for the `algebra` suite; unset runs the built-in set.
    #[serde(default)]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    /// Fock truncation degree for the suites.
    #[serde(default = "default_fock_degree")]
    pub fock_degree: usize,
    /// Heisenberg group order parameter: `z` has `heis_n - 1` components.
    #[serde(default = "default_heis_n")]
    pub heis_n: usize,
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Monte Carlo draws per Poisson estimate.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Monte Carlo draws per class-3 overlap.
    #[serde(default = "default_overlap_samples")]
    pub overlap_samples: usize,
    /// Weight convention used downstream of the convention discriminator.
    #[serde(default = "default_convention")]
    pub convention: Convention,
    #[serde(default = "default_out_dir", skip_serializing)]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_fock_degree() -> usize {
    8
}
fn default_heis_n() -> usize {
    2
}
fn default_seed() -> u64 {
    20_240_601
}
fn default_samples() -> usize {
    100_000
}
fn default_overlap_samples() -> usize {
    1_000_000
}
fn default_convention() -> Convention {
    Convention::Charfunc
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("reports")
}

/// Documented ranges of the numeric parameters.
pub const FOCK_DEGREE_RANGE: (usize, usize) = (2, 40);
pub const HEIS_N_RANGE: (usize, usize) = (2, 4);
pub const NODES_RANGE: (usize, usize) = (16, 4096);
pub const SAMPLES_RANGE: (usize, usize) = (1_000, 100_000_000);

impl SuiteConfig {
    /// Default configuration of a suite.
    pub fn new(suite: SuiteName) -> Self {
        Self {
            suite,
            algebra: None,
            grid: GridSpec::default(),
            fock_degree: default_fock_degree(),
            heis_n: default_heis_n(),
            window: WindowSpec::default(),
            seed: default_seed(),
            samples: default_samples(),
            overlap_samples: default_overlap_samples(),
            convention: default_convention(),
            out_dir: default_out_dir(),
            tolerances: Tolerances::default(),
        }
    }

    /// Reads a `.json` or `.toml` file, resolves relative algebra paths
    /// against its directory and validates.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let toml = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => true,
            Some("json") => false,
            _ => !text.trim_start().starts_with('{'),
        };
        let mut cfg = Self::parse(&text, toml).map_err(|e| prefix(path, e))?;
        if let Some(AlgebraSpec::File(p)) = &mut cfg.algebra {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        cfg.validate_in(&text).map_err(|e| prefix(path, e))?;
        Ok(cfg)
    }

    /// Parses without validating. Errors carry `line N, column M`.
    pub fn parse(text: &str, toml: bool) -> Result<Self> {
        if toml {
            toml::from_str(text).map_err(|e| {
                let line = e.span().map(|s| line_col(text, s.start));
                Error::Config(match line {
                    Some((l, c)) => format!("line {l}, column {c}: {}", e.message().trim()),
                    None => e.message().trim().to_string(),
                })
            })
        } else {
            serde_json::from_str(text).map_err(|e| {
                let msg = e.to_string();
                let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
                Error::Config(format!("line {}, column {}: {msg}", e.line(), e.column()))
            })
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_in("")
    }

    /// Range checks; `source` is searched for the offending key to report
    /// its line.
    fn validate_in(&self, source: &str) -> Result<()> {
        let fail = |key: &str, msg: String| {
            Err(Error::Config(match key_line(source, key) {
                Some(l) => format!("line {l}: {key}: {msg}"),
                None => format!("{key}: {msg}"),
            }))
        };
        let in_range = |v: usize, (lo, hi): (usize, usize)| (lo..=hi).contains(&v);

        if !in_range(self.fock_degree, FOCK_DEGREE_RANGE) {
            return fail("fock_degree", format!("{} outside {:?}", self.fock_degree, FOCK_DEGREE_RANGE));
        }
        if !in_range(self.heis_n, HEIS_N_RANGE) {
            return fail("heis_n", format!("{} outside {:?}", self.heis_n, HEIS_N_RANGE));
        }
        if !in_range(self.grid.nodes, NODES_RANGE) {
            return fail("nodes", format!("{} outside {:?}", self.grid.nodes, NODES_RANGE));
        }
        if !(self.grid.r_min > 0.0 && self.grid.r_min.is_finite()) {
            return fail("r_min", format!("{} must be positive", self.grid.r_min));
        }
        if !(self.grid.r_max > self.grid.r_min && self.grid.r_max.is_finite()) {
            return fail("r_max", format!("{} must exceed r_min = {}", self.grid.r_max, self.grid.r_min));
        }
        if let Err(e) = RadialProfile::parse(&self.grid.u) {
            return fail("u", e.to_string());
        }
        for (key, w) in [
            ("charfunc", self.window.charfunc),
            ("rn", self.window.rn),
            ("states", self.window.states),
        ] {
            if !(w[0] > 0.0 && w[1] > w[0] && w[1].is_finite()) {
                return fail(key, format!("window {w:?} must satisfy 0 < lo < hi"));
            }
        }
        for (key, v) in [("samples", self.samples), ("overlap_samples", self.overlap_samples)] {
            if !in_range(v, SAMPLES_RANGE) {
                return fail(key, format!("{v} outside {SAMPLES_RANGE:?}"));
            }
        }
        let t = &self.tolerances;
        for (key, v) in [
            ("group_law", t.group_law),
            ("abelian_overlap", t.abelian_overlap),
            ("sigmas", t.sigmas),
            ("cocycle", t.cocycle),
            ("cohomology", t.cohomology),
            ("fock_epsilon", t.fock_epsilon),
            ("two_path", t.two_path),
            ("unitary", t.unitary),
            ("rho", t.rho),
            ("projective", t.projective),
            ("leakage", t.leakage),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(key, format!("tolerance {v} must be positive and finite"));
            }
        }
        if !(t.sampler_level > 0.0 && t.sampler_level < 0.5) {
            return fail("sampler_level", format!("{} outside (0, 0.5)", t.sampler_level));
        }
        if !(t.exponent_band[0] < t.exponent_band[1]) {
            return fail("exponent_band", format!("{:?} is empty", t.exponent_band));
        }
        if let Some(AlgebraSpec::File(p)) = &self.algebra {
            if !p.is_file() {
                return fail("algebra", format!("file {} does not exist", p.display()));
            }
        }
        Ok(())
    }
}

fn prefix(path: &Path, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// One-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// First line assigning `key`, as `key =` (TOML) or `"key":` (JSON).
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start().trim_start_matches('{').trim_start();
        let rest = l
            .strip_prefix(&format!("\"{key}\""))
            .or_else(|| l.strip_prefix(key));
        rest.is_some_and(|r| {
            let r = r.trim_start();
            r.starts_with('=') || r.starts_with(':')
        })
    })
    .map(|i| i + 1)
}
