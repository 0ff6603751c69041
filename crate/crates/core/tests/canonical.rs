use num_complex::Complex64;
use proptest::prelude::*;
use special_reps::canonical::{
    almost_invariance_defect, scaled_mul, scaling_exponent, CanonicalRep, DirectIntegralVector,
    RadialGrid, RadialMeasure, RadialProfile, RepFamily, Scaled,
};
use special_reps::Error;

/// Characters `T(g) v = e^{i k g} v` of the line on `K = C`, with
/// `g^r = r g`.
struct Character {
    k: f64,
}

impl RepFamily for Character {
    type Group = f64;
    type Vector = Complex64;

    fn identity(&self) -> f64 {
        0.0
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn inv(&self, a: &f64) -> f64 {
        -a
    }
    fn dilate(&self, r: f64, g: &f64) -> f64 {
        r * g
    }
    fn act(&self, g: &f64, v: &Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.k * g) * v
    }
    fn combine(&self, terms: &[(Complex64, &Complex64)]) -> Complex64 {
        terms.iter().map(|(c, v)| c * *v).sum()
    }
    fn inner(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b.conj()
    }
}

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

/// `∫_0^∞ φ(r) d*r` through `t = ln r` on a wide window.
fn haar_oracle(phi: impl Fn(f64) -> f64) -> f64 {
    simpson(&|t: f64| phi(t.exp()), -40.0, 6.0, 1e-14)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn linear_measure() -> RadialMeasure {
    RadialMeasure::new(RadialGrid::standard(), RadialProfile::Linear).unwrap()
}

#[test]
fn identity_has_zero_defect_and_no_exponent() {
    let fam = Character { k: 1.0 };
    let meas = RadialMeasure::standard();
    let rep = almost_invariance_defect(&fam, &one(), &0.0, &meas).unwrap();
    assert_eq!(rep.integral, 0.0);
    let err = scaling_exponent(&fam, &one(), &0.0, &meas.grid, 1e-3, 1e-1).unwrap_err();
    assert!(matches!(err, Error::NumericallyInvariant(_)));
    let non_unit = Complex64::new(2.0, 0.0);
    assert!(matches!(
        almost_invariance_defect(&fam, &non_unit, &1.0, &meas),
        Err(Error::NotUnit(_))
    ));
}

#[test]
fn character_defect_matches_closed_form() {
    let fam = Character { k: 1.3 };
    let meas = RadialMeasure::standard();
    let g = 0.7;
    let rep = almost_invariance_defect(&fam, &one(), &g, &meas).unwrap();
    for (&r, v) in meas.grid.nodes().iter().zip(&rep.integrand) {
        let exact = (2.0 * (1.0 - (1.3 * g * r).cos())).sqrt() * (-r * r).exp();
        assert!((v - exact).abs() < 1e-12);
    }
    let oracle = haar_oracle(|r| 2.0 * (0.5 * 1.3 * g * r).sin().abs() * (-r * r).exp());
    assert!((rep.total() - oracle).abs() < 1e-7 * oracle, "{} vs {oracle}", rep.total());
    assert!((rep.tail.alpha - 1.0).abs() < 1e-3);
    let fit = scaling_exponent(&fam, &one(), &g, &meas.grid, 1e-3, 1e-1).unwrap();
    assert!((fit.slope - 1.0).abs() < 1e-3);
}

#[test]
fn refinement_changes_defect_by_under_one_percent() {
    let fam = Character { k: 1.0 };
    let coarse = RadialMeasure::standard();
    let fine = RadialMeasure::new(coarse.grid.refined(), RadialProfile::Quadratic).unwrap();
    let a = almost_invariance_defect(&fam, &one(), &2.0, &coarse).unwrap().integral;
    let b = almost_invariance_defect(&fam, &one(), &2.0, &fine).unwrap().integral;
    assert!((a - b).abs() < 0.01 * b);
}

#[test]
fn tilde_apply_bookkeeping() {
    let fam = Character { k: 1.0 };
    let rep = CanonicalRep::new(&fam, RadialMeasure::standard(), one()).unwrap();
    let grid = rep.grid().clone();
    let f = rep.section();
    let same = rep.tilde_apply(&Scaled::new(1.0, 0.0), &f).unwrap();
    assert_eq!(same.vector.fibers, f.fibers);
    assert_eq!(same.discarded_norm_sq, 0.0);

    // One step toward larger r: node 0 leaves, the last node is vacated.
    let step = rep.tilde_apply(&Scaled::new(grid.ratio(), 0.0), &f).unwrap();
    let share = grid.weight() * f.fibers[0].norm_sqr();
    assert!((step.discarded_norm_sq - share).abs() < 1e-18);
    let before = f.norm_sq(&fam, &grid);
    let after = step.vector.norm_sq(&fam, &grid);
    assert!((before - after - share).abs() < 1e-14 * before);
    assert!(!step.vector.valid[grid.len() - 1]);

    let off = rep.tilde_apply(&Scaled::new(1.05, 0.0), &f);
    assert!(matches!(off, Err(Error::OffGridScale(_))));
}

#[test]
fn full_cocycle_scale_norm_matches_oracle() {
    let fam = Character { k: 1.0 };
    let rep = CanonicalRep::new(&fam, linear_measure(), one()).unwrap();
    let grid = rep.grid().clone();
    for k in [1, 3, -2] {
        let r0 = grid.power(k);
        let beta = rep.full_cocycle(&Scaled::new(r0, 0.0)).unwrap();
        let norms = beta.fiber_norms_sq(&fam);
        let tail = special_reps::canonical::TailEstimate::fit(&grid, &norms);
        let got = grid.integrate(&norms) + tail.value;
        let oracle = haar_oracle(|r| ((-r * r0 / 2.0).exp() - (-r / 2.0).exp()).powi(2));
        assert!((got - oracle).abs() < 1e-8, "k = {k}: {got} vs {oracle}");
    }
    let id = rep.full_cocycle(&Scaled::new(1.0, 0.0)).unwrap();
    assert_eq!(id.norm_sq(&fam, &grid), 0.0);
}

#[test]
fn cohomology_reduction() {
    let fam = Character { k: 1.0 };
    let rep = CanonicalRep::new(&fam, linear_measure(), one()).unwrap();
    let same = rep.cohomology_reduce(RadialProfile::Linear).unwrap();
    assert_eq!(same.norm, 0.0);

    let red = rep.cohomology_reduce(RadialProfile::Power { coef: 1.0, exponent: 2.0 }).unwrap();
    let oracle = haar_oracle(|r| ((-r / 2.0).exp() - (-r * r / 2.0).exp()).powi(2));
    assert!((red.norm * red.norm - oracle).abs() < 1e-8 * oracle.max(1.0));

    // The coboundary links the two cocycles: β - β0 = T~(g) c - c.
    let g = 0.9;
    let c = &red.coboundary;
    let tc = rep.tilde_apply(&Scaled::new(1.0, g), c).unwrap().vector;
    let lhs = rep.cocycle(&g).sub(&red.representative.cocycle(&g), &fam);
    let rhs = tc.sub(c, &fam);
    let grid = rep.grid().clone();
    assert!(lhs.sub(&rhs, &fam).norm_sq(&fam, &grid).sqrt() < 1e-14);

    let bad = rep.cohomology_reduce(RadialProfile::Constant(1.0));
    assert!(matches!(bad, Err(Error::DivergentTail(_))));
}

#[test]
fn phase_rotation_is_a_coboundary_shift() {
    let fam = Character { k: 1.0 };
    let theta = 0.4;
    let phase = Complex64::from_polar(1.0, theta);
    let rep = CanonicalRep::new(&fam, RadialMeasure::standard(), one()).unwrap();
    let rot = CanonicalRep::new(&fam, RadialMeasure::standard(), phase).unwrap();
    let grid = rep.grid().clone();
    let g = 1.7;
    let f = rep.section();
    let tf = rep.tilde_apply(&Scaled::new(1.0, g), &f).unwrap().vector;
    let cob = DirectIntegralVector::combine(&fam, &[(phase - 1.0, &tf), (1.0 - phase, &f)]);
    let expected = DirectIntegralVector::combine(&fam, &[(one(), &rep.cocycle(&g)), (one(), &cob)]);
    let diff = rot.cocycle(&g).sub(&expected, &fam);
    assert!(diff.norm_sq(&fam, &grid).sqrt() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cocycle_identities(g1 in -3.0f64..3.0, g2 in -3.0f64..3.0, k1 in -4i64..4, k2 in -4i64..4) {
        let fam = Character { k: 1.0 };
        let rep = CanonicalRep::new(&fam, RadialMeasure::standard(), one()).unwrap();
        prop_assert!(rep.cocycle_identity_defect(&g1, &g2) < 1e-10);
        prop_assert!(rep.cocycle_identity_defect(&g1, &0.0) < 1e-12);
        let grid = rep.grid().clone();
        let p1 = Scaled::new(grid.power(k1), g1);
        let p2 = Scaled::new(grid.power(k2), g2);
        let d = rep.scaled_identity_defect(&p1, &p2).unwrap();
        prop_assert!(d.defect < 1e-10, "{:?}", d);
        // G0 part of the full cocycle coincides with the plain cocycle.
        let a = rep.full_cocycle(&Scaled::new(1.0, g1)).unwrap();
        prop_assert!(a.sub(&rep.cocycle(&g1), &fam).norm_sq(&fam, &grid) < 1e-28);
    }

    #[test]
    fn tilde_apply_is_a_homomorphism(g1 in -3.0f64..3.0, g2 in -3.0f64..3.0, k1 in -5i64..5, k2 in -5i64..5) {
        let fam = Character { k: 0.8 };
        let rep = CanonicalRep::new(&fam, RadialMeasure::standard(), one()).unwrap();
        let grid = rep.grid().clone();
        let f = rep.section();
        let p1 = Scaled::new(grid.power(k1), g1);
        let p2 = Scaled::new(grid.power(k2), g2);
        let two = rep.tilde_apply(&p1, &rep.tilde_apply(&p2, &f).unwrap().vector).unwrap().vector;
        let one_step = rep.tilde_apply(&scaled_mul(&fam, &p1, &p2), &f).unwrap().vector;
        for i in 0..grid.len() {
            if two.valid[i] && one_step.valid[i] {
                prop_assert!((two.fibers[i] - one_step.fibers[i]).norm() < 1e-12);
            }
        }
    }
}
