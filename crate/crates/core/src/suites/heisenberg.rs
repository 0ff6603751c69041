use num_complex::Complex64;
use rand::Rng;

use super::config::SuiteConfig;
use super::sample::{cx, grid_scaled, heis, heis_in_ball, point, scaled, wrap};
use super::{job, run_jobs, stream_rng, worst, Check};
use crate::canonical::{scaled_mul, tilde_apply, DirectIntegralVector};
use crate::error::Result;
use crate::heisenberg::{
    cocycle, difference_norm_sq, extended_apply, irrep_apply, lambda_multiplier, matrix_of,
    mobius_action, pu_decompose, rho_multiplier, CoherentCombination, DomainPoint, FockTruncation,
    FockVector, HeisElement, HeisenbergFamily, UnMatrix,
};

pub(crate) const FOCK_TRIALS: usize = 20;
pub(crate) const TWO_PATH_CASES: usize = 100;
pub(crate) const PU_CASES: usize = 100;
pub(crate) const RHO_TRIPLES: usize = 50;
/// Degree at which `ε(D)` is held to the configured target.
pub(crate) const ORACLE_DEGREE: usize = 12;
/// Degrees of the recorded `ε(D)` table at `|z0| = 1`.
const EPSILON_TABLE: [usize; 7] = [4, 6, 8, 10, 12, 14, 16];
/// Absolute slack for leakage comparisons at round-off level.
const ROUNDOFF: f64 = 1e-14;

pub(super) fn run(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let jobs = vec![
        job("heisenberg.fock", move || fock(cfg)),
        job("heisenberg.fock.epsilon", move || epsilon(cfg)),
        job("heisenberg.two_path", move || two_path(cfg)),
        job("heisenberg.unitary", move || unitary(cfg)),
        job("heisenberg.multiplier", move || multipliers(cfg)),
    ];
    Ok(run_jobs(jobs))
}

/// A random unit vector supported in degree `<= D/2`.
fn low_degree(tr: &FockTruncation, rng: &mut rand_chacha::ChaCha8Rng) -> FockVector {
    let mut v = tr.zero();
    for (i, c) in v.coeffs.iter_mut().enumerate() {
        if 2 * tr.total_degree(i) <= tr.degree() {
            *c = cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / tr.gram()[i].sqrt();
        }
    }
    let n = tr.norm(&v);
    v.coeffs.iter_mut().for_each(|c| *c /= n);
    v
}

/// Representation and isometry defects on the protected subspace, as
/// multiples of the declared leakage.
fn fock(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let m = cfg.heis_n - 1;
    let tr = FockTruncation::new(m, cfg.fock_degree)?;
    let mut rng = stream_rng(cfg.seed, 20);
    let (mut rep, mut iso, mut eps_max) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..FOCK_TRIALS {
        let (g1, g2) = (heis_in_ball(&mut rng, m, 1.0), heis_in_ball(&mut rng, m, 1.0));
        let f = low_degree(&tr, &mut rng);
        let a2 = irrep_apply(&tr, &g2, &f);
        let a1 = irrep_apply(&tr, &g1, &a2.vector);
        let a12 = irrep_apply(&tr, &g1.mul(&g2), &f);
        let diff = FockVector {
            coeffs: a1.vector.coeffs.iter().zip(&a12.vector.coeffs).map(|(x, y)| x - y).collect(),
        };
        let eps = a2.epsilon.max(a12.epsilon);
        eps_max = eps_max.max(eps);
        rep = rep.max(tr.norm(&diff) / (2.0 * eps + ROUNDOFF));
        iso = iso.max((tr.norm(&a2.vector) - 1.0).abs() / (a2.epsilon + ROUNDOFF));
    }
    let d = cfg.fock_degree;
    Ok(vec![
        Check::at_most(
            "heisenberg.fock.representation",
            rep,
            1.0,
            format!("defect / 2 eps(D), D = {d}, |z0| <= 1, {FOCK_TRIALS} pairs"),
        ),
        Check::at_most(
            "heisenberg.fock.isometry",
            iso,
            1.0,
            format!("| ||T f|| - 1 | / eps(D), D = {d}, |z0| <= 1"),
        ),
        Check::info("heisenberg.fock.epsilon_max", eps_max, "largest declared eps(D) over the trials"),
    ])
}

/// `ε(D)` at `|z0| = 1`, `n = 2`: the table, the target at the oracle
/// degree, and the per-step ratio against one half.
fn epsilon(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let g = HeisElement::from_tz(0.0, vec![cx(1.0, 0.0)]);
    let eps = EPSILON_TABLE
        .iter()
        .map(|&d| Ok((d, FockTruncation::new(1, d)?.leakage(&g))))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Check> = eps
        .iter()
        .map(|(d, e)| Check::info(format!("heisenberg.fock.epsilon_d{d:02}"), *e, "|z0| = 1, n = 2"))
        .collect();
    let at_oracle = eps.iter().find(|(d, _)| *d == ORACLE_DEGREE).map(|p| p.1).unwrap_or(f64::NAN);
    out.push(Check::at_most(
        "heisenberg.fock.epsilon_target",
        at_oracle,
        cfg.tolerances.fock_epsilon,
        format!("eps(D = {ORACLE_DEGREE}) at |z0| = 1, n = 2"),
    ));
    let ratio = worst(eps.windows(2).map(|w| w[1].1 / w[0].1));
    out.push(Check::at_most(
        "heisenberg.fock.epsilon_halving",
        ratio,
        0.5,
        "largest eps(D + 2) / eps(D) over the table",
    ));
    Ok(out)
}

/// Transport of coherent differences: Möbius action through the matrix of
/// `p` against the closed-form transport, and the exact family on grid
/// sections against the transported points.
fn two_path(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let m = cfg.heis_n - 1;
    let tol = cfg.tolerances.two_path;
    let mut rng = stream_rng(cfg.seed, 30);
    let mut points = 0.0f64;
    let mut norms = 0.0f64;
    for _ in 0..TWO_PATH_CASES {
        let (v1, v2) = (point(&mut rng, m), point(&mut rng, m));
        let p = scaled(&mut rng, m);
        let x = CoherentCombination::difference(v1, v2);
        let a = extended_apply(&matrix_of(&p), &x)?;
        let b = x.transport(&p);
        for ((_, s), (_, t)) in a.terms.iter().zip(&b.terms) {
            points = points.max(s.max_abs_diff(t));
            norms = norms.max(difference_norm_sq(s, t).sqrt());
        }
    }

    let meas = cfg.grid.measure()?;
    let grid = &meas.grid;
    let fam = HeisenbergFamily::new(cfg.heis_n)?;
    let one = Complex64::new(1.0, 0.0);
    let mut sections = 0.0f64;
    for _ in 0..10 {
        let (v1, v2) = (point(&mut rng, m), point(&mut rng, m));
        let g = heis(&mut rng, m, 0.3);
        let p = grid_scaled(&mut rng, grid, 3, g);
        let x = CoherentCombination::difference(v1, v2);
        let moved = tilde_apply(&fam, grid, &p, &x.section(grid))?;
        let target = x.transport(&p).section(grid);
        let d = DirectIntegralVector::combine(&fam, &[(one, &moved.vector), (-one, &target)]);
        sections = sections.max(d.norm_sq_on(&fam, grid, &[]).sqrt());
    }

    let mut cocycle_defect = 0.0f64;
    let n = cfg.heis_n;
    for _ in 0..20 {
        let (g1, g2) = (UnMatrix::random(&mut rng, n, 0.6), UnMatrix::random(&mut rng, n, 0.6));
        let b12 = cocycle(&g1.mul(&g2))?;
        let tb2 = extended_apply(&g1, &cocycle(&g2)?)?;
        let b1 = cocycle(&g1)?;
        let resid = b12.plus(&tb2.scaled(-one)).plus(&b1.scaled(-one));
        cocycle_defect = cocycle_defect.max(resid.norm_sq()?.max(0.0).sqrt());
    }

    Ok(vec![
        Check::at_most(
            "heisenberg.two_path.points",
            points,
            tol,
            format!("{TWO_PATH_CASES} random (p, v1, v2): matrix action vs transport formula"),
        ),
        Check::at_most("heisenberg.two_path.norm", norms, tol, "||f_a - f_b|| between the two images"),
        Check::at_most("heisenberg.two_path.sections", sections, tol, "exact family on grid sections, 10 cases"),
        Check::at_most("heisenberg.extended_cocycle", cocycle_defect, tol, "b(g) = f_{g v0} - f_{v0}, 20 pairs"),
    ])
}

/// Embedding of `P`, the Möbius action and the `pu` decomposition.
fn unitary(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let n = cfg.heis_n;
    let m = n - 1;
    let tol = cfg.tolerances.unitary;
    let fam = HeisenbergFamily::new(n)?;
    let mut rng = stream_rng(cfg.seed, 40);

    let mut hom = 0.0f64;
    for _ in 0..20 {
        let (p1, p2) = (scaled(&mut rng, m), scaled(&mut rng, m));
        let a = matrix_of(&p1).mul(&matrix_of(&p2));
        hom = hom.max(a.max_abs_diff(&matrix_of(&scaled_mul(&fam, &p1, &p2))));
        hom = hom.max(matrix_of(&p1).j_defect());
    }

    let mut action = 0.0f64;
    for _ in 0..30 {
        let (g1, g2) = (UnMatrix::random(&mut rng, n, 0.6), UnMatrix::random(&mut rng, n, 0.6));
        let v = point(&mut rng, m);
        let lhs = mobius_action(&g1.mul(&g2), &v)?;
        let rhs = mobius_action(&g1, &mobius_action(&g2, &v)?)?;
        action = action.max(lhs.max_abs_diff(&rhs) / (1.0 + lhs.a.norm()));
        let p = scaled(&mut rng, m);
        action = action.max(mobius_action(&matrix_of(&p), &v)?.max_abs_diff(&v.transport(&p)));
    }

    let base = DomainPoint::base(m);
    let (mut recon, mut stab) = (0.0f64, 0.0f64);
    for _ in 0..PU_CASES {
        let g = UnMatrix::random(&mut rng, n, 0.8);
        let (p, u) = pu_decompose(&g)?;
        recon = recon.max(matrix_of(&p).mul(&u).max_abs_diff(&g));
        stab = stab.max(mobius_action(&u, &base)?.max_abs_diff(&base));
    }
    let mut unique = 0.0f64;
    for _ in 0..10 {
        let p = scaled(&mut rng, m);
        let (q, u) = pu_decompose(&matrix_of(&p))?;
        unique = unique.max(u.max_abs_diff(&UnMatrix::identity(n)));
        unique = unique.max((q.scale - p.scale).abs()).max(q.body.max_abs_diff(&p.body));
        let k = UnMatrix::random_stabilizer(&mut rng, n, 1.0);
        let (q, u) = pu_decompose(&k)?;
        unique = unique.max((q.scale - 1.0).abs()).max(q.body.max_abs_diff(&HeisElement::identity(m)));
        unique = unique.max(u.max_abs_diff(&k));
    }

    Ok(vec![
        Check::at_most("heisenberg.embedding.homomorphism", hom, tol, "matrix(p1) matrix(p2) = matrix(p1 p2), 20 pairs"),
        Check::at_most("heisenberg.mobius.action", action, tol, "composition and agreement with transport, 30 cases"),
        Check::at_most(
            "heisenberg.pu.reconstruction",
            recon,
            tol,
            format!("||matrix(p) u - g|| over {PU_CASES} random J-unitaries, n = {n}"),
        ),
        Check::at_most("heisenberg.pu.stabilizer", stab, tol, format!("|u v0 - v0| over {PU_CASES} cases")),
        Check::at_most("heisenberg.pu.uniqueness", unique, tol, "g in P gives u = 1; g in the stabilizer gives p = 1"),
    ])
}

/// `ρ` is a 2-cocycle mod 2π; `λ(p, g) = ln(r0) / 2` on `P`.
fn multipliers(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let n = cfg.heis_n;
    let mut rng = stream_rng(cfg.seed, 50);
    let e = UnMatrix::identity(n);
    let (mut cyc, mut unit) = (0.0f64, 0.0f64);
    for _ in 0..RHO_TRIPLES {
        let g: Vec<UnMatrix> = (0..3).map(|_| UnMatrix::random(&mut rng, n, 0.6)).collect();
        unit = unit.max(rho_multiplier(&e, &g[0])?.abs()).max(rho_multiplier(&g[0], &e)?.abs());
        let lhs = rho_multiplier(&g[0], &g[1])? + rho_multiplier(&g[0].mul(&g[1]), &g[2])?;
        let rhs = rho_multiplier(&g[1], &g[2])? + rho_multiplier(&g[0], &g[1].mul(&g[2]))?;
        cyc = cyc.max(wrap(lhs - rhs).abs());
    }
    let mut lambda = 0.0f64;
    for _ in 0..10 {
        let g = UnMatrix::random(&mut rng, n, 0.6);
        let p = scaled(&mut rng, n - 1);
        let l = lambda_multiplier(&matrix_of(&p), &g)?;
        lambda = lambda.max((l - cx(0.5 * p.scale.ln(), 0.0)).norm());
        lambda = lambda.max(lambda_multiplier(&e, &g)?.norm());
    }
    let tol = cfg.tolerances.rho;
    Ok(vec![
        Check::at_most("heisenberg.rho.cocycle", cyc, tol, format!("mod 2 pi over {RHO_TRIPLES} random triples")),
        Check::at_most("heisenberg.rho.normalized", unit, tol, "rho(1, g) = rho(g, 1) = 0"),
        Check::at_most("heisenberg.lambda.on_p", lambda, cfg.tolerances.unitary, "lambda(p, g) = ln(r0) / 2"),
    ])
}
