//! Named verification suites. Each suite is a pure function of its
//! [`SuiteConfig`]; checks may run concurrently and the report is sorted by
//! check id.

mod algebra;
mod cocycle;
mod config;
mod heisenberg;
mod overlap;
mod poisson;
mod projective;
mod report;
mod sample;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{
    AlgebraSpec, GridSpec, SuiteConfig, SuiteName, Tolerances, WindowSpec, FOCK_DEGREE_RANGE,
    HEIS_N_RANGE, NODES_RANGE, SAMPLES_RANGE,
};
pub use report::{Check, CheckKind, Report, SCHEMA_VERSION};

use crate::error::Result;

/// Runs the configured suite. Configuration errors abort; failures inside
/// a check become failing rows.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let checks = match cfg.suite {
        SuiteName::Algebra => algebra::run(cfg)?,
        SuiteName::Cocycle => cocycle::run(cfg)?,
        SuiteName::Overlap => overlap::run(cfg)?,
        SuiteName::Heisenberg => heisenberg::run(cfg)?,
        SuiteName::Poisson => poisson::run(cfg)?,
        SuiteName::Projective => projective::run(cfg)?,
    };
    Ok(Report::new(cfg, checks))
}

/// [`run_suite`] followed by writing `<suite>.csv` and `<suite>.json` into
/// the configured output directory.
pub fn run_and_write(cfg: &SuiteConfig) -> Result<(Report, PathBuf, PathBuf)> {
    let report = run_suite(cfg)?;
    let (csv, json) = report.write(&cfg.out_dir)?;
    Ok((report, csv, json))
}

/// Independent ChaCha stream `stream` of the run seed.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

type Job<'a> = Box<dyn Fn() -> Result<Vec<Check>> + Send + Sync + 'a>;

/// Runs jobs in parallel. A job that errors contributes one failing row
/// under its name.
pub(crate) fn run_jobs(jobs: Vec<(String, Job<'_>)>) -> Vec<Check> {
    jobs.into_par_iter()
        .flat_map_iter(|(id, job)| match job() {
            Ok(v) => v,
            Err(e) => vec![Check::error(id, &e)],
        })
        .collect()
}

pub(crate) fn job<'a>(id: &str, f: impl Fn() -> Result<Vec<Check>> + Send + Sync + 'a) -> (String, Job<'a>) {
    (id.to_string(), Box::new(f))
}

/// Largest element, NaN-propagating.
pub(crate) fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m: f64, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}
