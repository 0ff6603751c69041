use num_rational::Rational64;
use rand::Rng;

use super::config::{AlgebraSpec, SuiteConfig};
use super::{job, run_jobs, stream_rng, worst, Check};
use crate::error::Result;
use crate::lie_core::Diagnostic;
use crate::{Algebra, ExactAlgebra};

pub(crate) const TRIPLES: usize = 100;

/// Built-in set when no algebra is configured.
const BUILTIN: [AlgebraSpec; 4] = [
    AlgebraSpec::Abelian(3),
    AlgebraSpec::Heisenberg(2),
    AlgebraSpec::Heisenberg(3),
    AlgebraSpec::Free(3),
];

pub(super) fn run(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let specs: Vec<AlgebraSpec> = match &cfg.algebra {
        Some(s) => vec![s.clone()],
        None => BUILTIN.to_vec(),
    };
    let built = specs.iter().map(|s| s.build()).collect::<Result<Vec<_>>>()?;
    let tol = cfg.tolerances.group_law;
    let mut jobs: Vec<_> = built
        .iter()
        .enumerate()
        .map(|(k, (name, alg))| {
            job(&format!("algebra.{name}"), move || Ok(algebra_checks(name, alg, tol, cfg.seed, k as u64)))
        })
        .collect();
    if cfg.algebra.is_none() {
        jobs.push(job("algebra.bch", move || Ok(vec![class_two_exact(cfg.seed)])));
    }
    Ok(run_jobs(jobs))
}

fn algebra_checks(name: &str, alg: &Algebra, tol: f64, seed: u64, stream: u64) -> Vec<Check> {
    let id = |s: &str| format!("algebra.{name}.{s}");
    let diags = alg.validate();
    let mut out = Vec::new();
    let kinds: [(&str, fn(&Diagnostic) -> Option<f64>); 3] = [
        ("antisymmetry", |d| match d {
            Diagnostic::Antisymmetry { defect, .. } => Some(*defect),
            _ => None,
        }),
        ("grading", |d| match d {
            Diagnostic::Grading { defect, .. } => Some(*defect),
            _ => None,
        }),
        ("jacobi", |d| match d {
            Diagnostic::Jacobi { defect, .. } => Some(*defect),
            _ => None,
        }),
    ];
    for (kind, pick) in kinds {
        let hits: Vec<(&Diagnostic, f64)> = diags.iter().filter_map(|d| pick(d).map(|v| (d, v))).collect();
        let detail = match hits.first() {
            Some((d, _)) => format!("{} violation(s); first: {d}", hits.len()),
            None => String::new(),
        };
        out.push(Check::at_most(id(kind), worst(hits.iter().map(|h| h.1)), tol, detail));
    }
    let sharp = !diags.iter().any(|d| matches!(d, Diagnostic::ClassNotSharp { .. }));
    let detail = if sharp { String::new() } else { format!("class {} is not sharp", alg.class()) };
    out.push(Check::flag(id("class_sharp"), sharp, detail));
    if !diags.is_empty() {
        return out;
    }

    let mut rng = stream_rng(seed, stream);
    let (mut assoc, mut ident, mut inv, mut dil) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let run = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<[f64; 4]> {
        let a = alg.sample_element(rng, 1.0);
        let b = alg.sample_element(rng, 1.0);
        let c = alg.sample_element(rng, 1.0);
        let left = alg.group_mul(&alg.group_mul(&a, &b)?, &c)?;
        let right = alg.group_mul(&a, &alg.group_mul(&b, &c)?)?;
        let e = alg.zero();
        let id_defect = alg
            .group_mul(&a, &e)?
            .sub(&a)
            .max_abs()
            .max(alg.group_mul(&e, &a)?.sub(&a).max_abs());
        let ai = alg.group_inv(&a)?;
        let inv_defect = alg.group_mul(&a, &ai)?.max_abs().max(alg.group_mul(&ai, &a)?.max_abs());
        let r: f64 = rng.gen_range(0.2..3.0);
        let dl = alg.dilate(&r, &alg.group_mul(&a, &b)?)?;
        let dr = alg.group_mul(&alg.dilate(&r, &a)?, &alg.dilate(&r, &b)?)?;
        Ok([left.sub(&right).max_abs(), id_defect, inv_defect, dl.sub(&dr).max_abs()])
    };
    for _ in 0..TRIPLES {
        match run(&mut rng) {
            Ok([a, i, v, d]) => {
                assoc = assoc.max(a);
                ident = ident.max(i);
                inv = inv.max(v);
                dil = dil.max(d);
            }
            Err(e) => return vec![Check::error(id("group_law"), &e)],
        }
    }
    let note = format!("max over {TRIPLES} random triples in the unit box");
    out.push(Check::at_most(id("associativity"), assoc, tol, note.clone()));
    out.push(Check::at_most(id("identity"), ident, tol, note.clone()));
    out.push(Check::at_most(id("inverse"), inv, tol, note.clone()));
    out.push(Check::at_most(id("dilation_automorphism"), dil, tol, note));
    out
}

/// `a·b = a + b + ½[a, b]` in exact rational arithmetic on the 5-dimensional
/// Heisenberg algebra; the value is the number of mismatching pairs.
fn class_two_exact(seed: u64) -> Check {
    let alg = ExactAlgebra::heisenberg(3).expect("built-in algebra");
    let mut rng = stream_rng(seed, 1000);
    let half = Rational64::new(1, 2);
    let mut mismatches = 0usize;
    let q = |rng: &mut rand_chacha::ChaCha8Rng| {
        alg.element((0..5).map(|_| Rational64::new(rng.gen_range(-60..60), rng.gen_range(1..12))).collect())
            .expect("five coordinates")
    };
    for _ in 0..TRIPLES {
        let (a, b) = (q(&mut rng), q(&mut rng));
        let closed = a.add(&b).add(&alg.bracket(&a, &b).expect("same algebra").scale(&half));
        if alg.group_mul(&a, &b).ok() != Some(closed) {
            mismatches += 1;
        }
    }
    Check::at_most(
        "algebra.bch.class2_exact",
        mismatches as f64,
        0.0,
        format!("rational pairs out of {TRIPLES} whose product differs from a + b + [a,b]/2"),
    )
}
