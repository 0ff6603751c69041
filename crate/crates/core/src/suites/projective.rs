use num_complex::Complex64;

use super::config::SuiteConfig;
use super::poisson::mc;
use super::sample::{p_current, u_current, wrap};
use super::{job, run_jobs, stream_rng, Check};
use crate::canonical::RepFamily;
use crate::error::Result;
use crate::heisenberg::{matrix_of, rho_multiplier, HeisenbergFamily, UnMatrix};
use crate::poisson::{
    heis_current_apply, projective_check, qps_inner_mc, un1_current_apply, BaseSpace, Convention,
    CurrentElement, CurrentSection, PState, UState,
};

pub(crate) const TRIPLES: usize = 50;
pub(crate) const TRIALS: usize = 10;
const PROBES: usize = 10;
const MAX_CELLS: usize = 4;
/// Window of the quadrature reference for the closed-form inner product.
const WIDE_WINDOW: [f64; 2] = [-12.0, 3.0];

pub(super) fn run(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let jobs = vec![
        job("projective.rho", move || rho(cfg)),
        job("projective.current", move || currents(cfg)),
        job("projective.p_restriction", move || restriction(cfg)),
        job("projective.coherent", move || coherent(cfg)),
    ];
    Ok(run_jobs(jobs))
}

fn rho(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let n = cfg.heis_n;
    let mut rng = stream_rng(cfg.seed, 300);
    let e = UnMatrix::identity(n);
    let (mut cocycle, mut normal) = (0.0f64, 0.0f64);
    for _ in 0..TRIPLES {
        let g: Vec<UnMatrix> = (0..3).map(|_| UnMatrix::random(&mut rng, n, 0.5)).collect();
        let lhs = rho_multiplier(&g[0], &g[1])? + rho_multiplier(&g[0].mul(&g[1]), &g[2])?;
        let rhs = rho_multiplier(&g[1], &g[2])? + rho_multiplier(&g[0], &g[1].mul(&g[2]))?;
        cocycle = cocycle.max(wrap(lhs - rhs).abs());
        normal = normal.max(rho_multiplier(&e, &g[0])?.abs()).max(rho_multiplier(&g[0], &e)?.abs());
    }
    let tol = cfg.tolerances.rho;
    Ok(vec![
        Check::at_most("projective.rho.cocycle", cocycle, tol, format!("mod 2 pi, {TRIPLES} random triples")),
        Check::at_most("projective.rho.normalized", normal, tol, "rho(e, g) and rho(g, e)"),
    ])
}

/// `U(g1 g2) F = e^{i ∫ρ} U(g1) U(g2) F` and isometry, tested against
/// product-state probes.
fn currents(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let n = cfg.heis_n;
    let mut rng = stream_rng(cfg.seed, 310);
    let cells = |rng: &mut rand_chacha::ChaCha8Rng| 1 + (rand::Rng::gen_range(rng, 0..MAX_CELLS));
    let probes: Vec<UState> = (0..PROBES)
        .map(|_| {
            let c = cells(&mut rng);
            UState::new(u_current(&mut rng, c, n))
        })
        .collect();
    let id = CurrentElement::constant(UnMatrix::identity(n));
    let mut ident: f64 = 0.0;
    let (mut defect, mut iso) = (0.0f64, 0.0f64);
    for _ in 0..TRIALS {
        let (c1, c2, c3) = (cells(&mut rng), cells(&mut rng), cells(&mut rng));
        let g1 = u_current(&mut rng, c1, n);
        let g2 = u_current(&mut rng, c2, n);
        let state = UState::new(u_current(&mut rng, c3, n));
        ident = ident.max(un1_current_apply(&id, &state)?.log_prefactor.norm());
        let check = projective_check(&g1, &g2, &state, &probes)?;
        defect = defect.max(check.max_defect);
        iso = iso.max(check.max_isometry_defect);
    }
    let tol = cfg.tolerances.projective;
    let note = format!("{TRIALS} pairs of currents with at most {MAX_CELLS} cells, {PROBES} probes");
    Ok(vec![
        Check::at_most("projective.current.multiplier", defect, tol, note.clone()),
        Check::at_most("projective.current.isometry", iso, tol, note),
        Check::at_most("projective.current.identity", ident, tol, "prefactor added by the constant identity"),
    ])
}

/// The `U(n, 1)` current operators restricted to `P` against the direct
/// `P` action on coherent product states.
fn restriction(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let n = cfg.heis_n;
    let m = n - 1;
    let fam = HeisenbergFamily::new(n)?;
    let mut rng = stream_rng(cfg.seed, 320);
    let (mut pre, mut inner) = (0.0f64, 0.0f64);
    for _ in 0..TRIALS {
        let state = PState::new(p_current(&mut rng, 3, m));
        let p0 = p_current(&mut rng, 2, m);
        let via_u = un1_current_apply(&p0.map(matrix_of), &state.to_unitary())?;
        let via_p = heis_current_apply(&fam, &p0, &state);
        pre = pre.max((via_u.log_prefactor - via_p.log_prefactor).norm());
        let probe = PState::new(p_current(&mut rng, 2, m));
        let a = via_u.inner(&probe.to_unitary())?;
        let b = via_p.inner(&probe);
        inner = inner.max((a - b).norm() / b.norm().max(1.0));
    }
    let tol = cfg.tolerances.projective;
    Ok(vec![
        Check::at_most("projective.p_restriction.prefactor", pre, tol, format!("{TRIALS} random P currents")),
        Check::at_most("projective.p_restriction.inner", inner, tol, "relative to max(1, |inner|)"),
    ])
}

fn log_quad(phi: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(|s: f64| phi(s.exp()), a.ln(), b.ln(), 1e-14).integral
}

/// Coherent inner products: closed form against Campbell quadrature on a
/// wide window, and Monte Carlo against Campbell quadrature on the
/// configured window.
fn coherent(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let n = cfg.heis_n;
    let fam = HeisenbergFamily::new(n)?;
    let mut rng = stream_rng(cfg.seed, 330);
    let a = PState::new(p_current(&mut rng, 2, n - 1));
    let b = PState::new(p_current(&mut rng, 3, n - 1));
    let (pa, pb) = (a.points(), b.points());
    let cells = pa.zip_with(&pb, |v, w| (v.clone(), w.clone()));
    let space = BaseSpace::new(cfg.window.states[0], cfg.window.states[1], crate::canonical::RadialProfile::parse(&cfg.grid.u)?)?;
    let u = space.u.clone();
    // E[π Π h] = exp ∫∫ (e^{±u} h - 1) e^{-u} d*r dm.
    let sign = match cfg.convention {
        Convention::Charfunc => 1.0,
        Convention::AsStated => -1.0,
    };
    let campbell = |lo: f64, hi: f64, weighted: bool| {
        let mut e = Complex64::new(0.0, 0.0);
        for (wt, (v, w)) in cells.cells() {
            let h = |r: f64| fam.inner(&v.fiber(r), &w.fiber(r));
            let (re, im) = if weighted {
                let k = |r: f64| ((sign - 1.0) * u.eval(r)).exp();
                (
                    log_quad(|r| k(r) * h(r).re - (-u.eval(r)).exp(), lo, hi),
                    log_quad(|r| k(r) * h(r).im, lo, hi),
                )
            } else {
                (log_quad(|r| h(r).re - (-2.0 * r * r).exp(), lo, hi), log_quad(|r| h(r).im, lo, hi))
            };
            e += Complex64::new(re, im) * wt;
        }
        e.exp()
    };
    let exact = a.inner(&b);
    let wide = campbell(WIDE_WINDOW[0].exp(), WIDE_WINDOW[1].exp(), false);
    let closed = (wide - exact).norm() / exact.norm();

    let (la, lb) = (pa.clone(), pb.clone());
    let fa = move |r: f64, x: f64| la.at(x).fiber(r);
    let fb = move |r: f64, x: f64| lb.at(x).fiber(r);
    let (sa, sb) = (CurrentSection::new(&fam, &fa), CurrentSection::new(&fam, &fb));
    let (est, se) = qps_inner_mc(&space, cfg.convention, &sa, &sb, &mc(cfg, 340))?;
    let (r0, r1) = space.window();
    let windowed = campbell(r0, r1, true);
    Ok(vec![
        Check::at_most(
            "projective.coherent.closed_form",
            closed,
            cfg.tolerances.projective,
            format!("relative gap to quadrature on [e^{}, e^{}]", WIDE_WINDOW[0], WIDE_WINDOW[1]),
        ),
        Check::at_most(
            "projective.coherent.mc_z",
            (est - windowed).norm() / se,
            cfg.tolerances.sigmas,
            format!("mc {est:.6} +- {se:.2e} vs windowed {windowed:.6}, {} convention", cfg.convention.label()),
        ),
    ])
}
