use nalgebra::DMatrix;
use rand::Rng;

use super::config::SuiteConfig;
use super::sample::heis;
use super::{job, run_jobs, stream_rng, worst, Check};
use crate::canonical::{CanonicalRep, RadialMeasure, RadialProfile, RepFamily, Scaled};
use crate::error::{Error, Result};
use crate::heisenberg::{FockFamily, FockTruncation, HeisenbergFamily};
use crate::regular::{regular_cocycle, GaussianVector, RegularFamily, RegularRep};
use crate::Algebra;

pub(crate) const PAIRS: usize = 50;
/// Scale parts are grid powers in `[-SCALE_STEPS, SCALE_STEPS]`.
const SCALE_STEPS: i64 = 4;
/// Fock degree of the truncated family, reported for the record.
const FOCK_RECORD_DEGREE: usize = 8;

pub(super) fn run(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let meas = cfg.grid.measure()?;
    let m = cfg.heis_n - 1;
    let seed = cfg.seed;
    let tol = cfg.tolerances.cocycle;
    let jobs = vec![
        job("cocycle.regular_abelian", {
            let meas = meas.clone();
            move || {
                let alg = Algebra::abelian(2)?;
                let mu = GaussianVector::new(&alg, vec![DMatrix::from_row_slice(2, 2, &[1.2, 0.3, 0.3, 0.7])])?;
                let fam = RegularFamily::new(RegularRep::new(alg, mu)?, vec![])?;
                let rep = regular_cocycle(&fam, meas.clone())?;
                Ok(identity_checks("cocycle.regular_abelian", &rep, tol, seed, 1, |rng| {
                    fam.rep.algebra().sample_element(rng, 2.0)
                }))
            }
        }),
        job("cocycle.regular_heisenberg", {
            let meas = meas.clone();
            move || {
                let alg = Algebra::heisenberg(2)?;
                let mu = GaussianVector::new(
                    &alg,
                    vec![
                        DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.8]),
                        DMatrix::from_row_slice(1, 1, &[0.6]),
                    ],
                )?;
                let fam = RegularFamily::new(RegularRep::new(alg, mu)?, vec![])?;
                let rep = regular_cocycle(&fam, meas.clone())?;
                Ok(identity_checks("cocycle.regular_heisenberg", &rep, tol, seed, 2, |rng| {
                    fam.rep.algebra().sample_element(rng, 2.0)
                }))
            }
        }),
        job("cocycle.heisenberg_coherent", {
            let meas = meas.clone();
            move || {
                let fam = HeisenbergFamily::new(m + 1)?;
                let rep = CanonicalRep::new(&fam, meas.clone(), fam.vacuum())?;
                Ok(identity_checks("cocycle.heisenberg_coherent", &rep, tol, seed, 3, |rng| heis(rng, m, 1.0)))
            }
        }),
        job("cocycle.heisenberg_fock", {
            let meas = meas.clone();
            move || {
                let trunc = FockTruncation::new(m, FOCK_RECORD_DEGREE)?;
                let fam = FockFamily { trunc: trunc.clone() };
                let rep = CanonicalRep::new(&fam, meas.clone(), trunc.vacuum())?;
                let mut rng = stream_rng(seed, 4);
                let d = worst((0..PAIRS).map(|_| {
                    let (g1, g2) = (heis(&mut rng, m, 1.0), heis(&mut rng, m, 1.0));
                    rep.cocycle_identity_defect(&g1, &g2)
                }));
                Ok(vec![Check::info(
                    "cocycle.heisenberg_fock.identity",
                    d,
                    format!("truncated Fock family, degree {FOCK_RECORD_DEGREE}; defect includes truncation leakage"),
                )])
            }
        }),
        job("cocycle.cohomology", move || cohomology(cfg)),
    ];
    Ok(run_jobs(jobs))
}

/// Plain and scaled cocycle identities over `PAIRS` random pairs. Every
/// third pair is a pure scale followed by a pure translation.
fn identity_checks<F: RepFamily>(
    prefix: &str,
    rep: &CanonicalRep<'_, F>,
    tol: f64,
    seed: u64,
    stream: u64,
    mut draw: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> F::Group,
) -> Vec<Check> {
    let mut rng = stream_rng(seed, stream);
    let grid = rep.grid().clone();
    let fam = rep.family();
    let (mut plain, mut scaled, mut loss) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..PAIRS {
        let (g1, g2) = (draw(&mut rng), draw(&mut rng));
        plain = plain.max(rep.cocycle_identity_defect(&g1, &g2));
        let (k1, k2) = (rng.gen_range(-SCALE_STEPS..=SCALE_STEPS), rng.gen_range(-SCALE_STEPS..=SCALE_STEPS));
        let (p1, p2) = if i % 3 == 0 {
            (Scaled::new(grid.power(k1), fam.identity()), Scaled::new(1.0, g2))
        } else {
            (Scaled::new(grid.power(k1), g1), Scaled::new(grid.power(k2), g2))
        };
        match rep.scaled_identity_defect(&p1, &p2) {
            Ok(d) => {
                scaled = scaled.max(d.defect);
                loss = loss.max(d.boundary_loss);
            }
            Err(e) => return vec![Check::error(format!("{prefix}.scaled_identity"), &e)],
        }
    }
    vec![
        Check::at_most(format!("{prefix}.identity"), plain, tol, format!("max over {PAIRS} random pairs")),
        Check::at_most(
            format!("{prefix}.scaled_identity"),
            scaled,
            tol,
            format!("max over {PAIRS} pairs with grid-power scales in [-{SCALE_STEPS}, {SCALE_STEPS}]"),
        ),
        Check::info(format!("{prefix}.boundary_loss"), loss, "largest norm^2 pushed off the grid"),
    ]
}

/// `(u, u0) = (r, r^2)` against a double-exponential quadrature of
/// `∫_0^∞ (e^{-r/2} - e^{-r^2/2})^2 d*r`; `u0 ≡ 1` must be refused.
fn cohomology(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let fam = HeisenbergFamily::new(cfg.heis_n)?;
    let base = cfg.grid.measure()?;
    let meas = RadialMeasure::new(base.grid.clone(), RadialProfile::Linear)?;
    let rep = CanonicalRep::new(&fam, meas, fam.vacuum())?;
    let tol = cfg.tolerances.cohomology;
    let mut out = Vec::new();

    let same = rep.cohomology_reduce(RadialProfile::Linear)?;
    out.push(Check::at_most("cocycle.cohomology.same_profile", same.norm, tol, "coboundary norm for u0 = u"));

    let red = rep.cohomology_reduce(RadialProfile::Power { coef: 1.0, exponent: 2.0 })?;
    let phi = |t: f64| {
        let r = t.exp();
        ((-r / 2.0).exp() - (-r * r / 2.0).exp()).powi(2)
    };
    let oracle = quadrature::double_exponential::integrate(phi, -60.0, 0.0, 1e-14).integral
        + quadrature::double_exponential::integrate(phi, 0.0, 8.0, 1e-14).integral;
    let got = red.norm * red.norm;
    out.push(Check::at_most(
        "cocycle.cohomology.linear_to_square",
        (got - oracle).abs() / oracle.max(1.0),
        tol,
        format!("coboundary norm^2 {got:e} vs quadrature {oracle:e}"),
    ));

    let refused = rep.cohomology_reduce(RadialProfile::Constant(1.0));
    let (flagged, detail) = match &refused {
        Err(e @ Error::DivergentTail(_)) => (true, e.to_string()),
        Err(e) => (false, format!("unexpected error: {e}")),
        Ok(r) => (false, format!("accepted with norm {:e}", r.norm)),
    };
    out.push(Check::flag("cocycle.cohomology.constant_flagged", flagged, detail));
    Ok(out)
}
