use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::family::{scaled_mul, RepFamily, Scaled};
use super::grid::{RadialGrid, RadialMeasure, RadialProfile, TailEstimate};
use super::vector::DirectIntegralVector;
use crate::error::{Error, Result};
use crate::numeric::{fit_line, LineFit};

/// Tolerance on `||h|| = 1`.
pub const UNIT_TOL: f64 = 1e-10;
/// Defects below this are indistinguishable from zero.
pub const INVARIANT_FLOOR: f64 = 1e-14;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_unit<F: RepFamily>(fam: &F, h: &F::Vector) -> Result<()> {
    let n = fam.norm_sq(h).sqrt();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(n));
    }
    Ok(())
}

/// Grid quadrature of `∫ ||T_r(g)h - h|| e^{-u/2} d*r` plus the small-r tail.
#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub integral: f64,
    pub tail: TailEstimate,
    pub integrand: Vec<f64>,
}

impl DefectReport {
    pub fn total(&self) -> f64 {
        self.integral + self.tail.value
    }
}

pub fn almost_invariance_defect<F: RepFamily>(
    fam: &F,
    h: &F::Vector,
    g: &F::Group,
    meas: &RadialMeasure,
) -> Result<DefectReport> {
    check_unit(fam, h)?;
    let integrand: Vec<f64> = meas
        .grid
        .nodes()
        .par_iter()
        .map(|&r| fam.defect_sq(r, g, h).sqrt() * meas.half_density(r))
        .collect();
    Ok(DefectReport {
        integral: meas.grid.integrate(&integrand),
        tail: TailEstimate::fit(&meas.grid, &integrand),
        integrand,
    })
}

/// Slope of `log ||T_r(g)h - h||` against `log r` over grid nodes in
/// `[r_lo, r_hi]`.
pub fn scaling_exponent<F: RepFamily>(
    fam: &F,
    h: &F::Vector,
    g: &F::Group,
    grid: &RadialGrid,
    r_lo: f64,
    r_hi: f64,
) -> Result<LineFit> {
    let idx = grid.window(r_lo, r_hi);
    if idx.len() < 6 {
        return Err(Error::Config(format!(
            "scaling window [{r_lo}, {r_hi}] holds {} nodes, need at least 6",
            idx.len()
        )));
    }
    let pts: Vec<(f64, f64)> = idx
        .par_iter()
        .map(|&i| {
            let r = grid.nodes()[i];
            (r.ln(), fam.defect_sq(r, g, h).sqrt())
        })
        .collect();
    if pts.iter().any(|(_, d)| *d < INVARIANT_FLOOR) {
        return Err(Error::NumericallyInvariant(INVARIANT_FLOOR));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().map(|(x, d)| (x, d.ln())).unzip();
    Ok(fit_line(&x, &y))
}

/// Smallest almost-invariance integral over the sampled elements; a value
/// near zero flags `h` as (nearly) invariant.
pub fn invariance_probe<F: RepFamily>(
    fam: &F,
    h: &F::Vector,
    samples: &[F::Group],
    meas: &RadialMeasure,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for g in samples {
        best = best.min(almost_invariance_defect(fam, h, g, meas)?.integral);
    }
    Ok(best)
}

/// `(T~(r0, g) f)(r) = T_r(g) f(r r0)`; `r0` must be a power of the
/// grid ratio. Vacated nodes are zero-filled and flagged invalid.
pub fn tilde_apply<F: RepFamily>(
    fam: &F,
    grid: &RadialGrid,
    p: &Scaled<F::Group>,
    f: &DirectIntegralVector<F::Vector>,
) -> Result<Shifted<F::Vector>> {
    let k = grid.shift_of(p.scale)?;
    let n = f.len() as i64;
    let zero = fam.combine(&[]);
    let nodes = grid.nodes();
    let fibers: Vec<F::Vector> = (0..n)
        .into_par_iter()
        .map(|i| {
            let j = i + k;
            if (0..n).contains(&j) {
                fam.apply(nodes[i as usize], &p.body, &f.fibers[j as usize])
            } else {
                zero.clone()
            }
        })
        .collect();
    let valid = (0..n)
        .map(|i| {
            let j = i + k;
            (0..n).contains(&j) && f.valid[j as usize]
        })
        .collect();
    let kept = |j: i64| (0..n).contains(&(j - k));
    let lost: Vec<f64> = (0..n)
        .filter(|&j| !kept(j) && f.valid[j as usize])
        .map(|j| fam.norm_sq(&f.fibers[j as usize]))
        .collect();
    Ok(Shifted {
        vector: DirectIntegralVector { fibers, valid },
        discarded_norm_sq: grid.integrate(&lost),
    })
}

/// The special representation `T~` on sections over the grid, the section
/// `f(r) = e^{-u(r)/2} h`, and the cocycle `β(p) = T~(p) f - f`.
#[derive(Debug, Clone)]
pub struct CanonicalRep<'a, F: RepFamily> {
    pub fam: &'a F,
    pub meas: RadialMeasure,
    pub h: F::Vector,
    half: Vec<f64>,
}

/// Result of applying `T~(r0, g)`.
#[derive(Debug, Clone)]
pub struct Shifted<V> {
    pub vector: DirectIntegralVector<V>,
    /// `||f||^2` carried by nodes pushed off the grid.
    pub discarded_norm_sq: f64,
}

/// `||β(p1 p2) - T~(p1) β(p2) - β(p1)||` on nodes that stay on the grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityDefect {
    pub defect: f64,
    pub boundary_loss: f64,
}

impl<'a, F: RepFamily> CanonicalRep<'a, F> {
    pub fn new(fam: &'a F, meas: RadialMeasure, h: F::Vector) -> Result<Self> {
        check_unit(fam, &h)?;
        let half = meas.half_densities();
        Ok(Self { fam, meas, h, half })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.meas.grid
    }

    pub fn family(&self) -> &'a F {
        self.fam
    }

    fn scaled_h(&self, c: f64) -> F::Vector {
        self.fam.combine(&[(Complex64::new(c, 0.0), &self.h)])
    }

    /// `f(r) = e^{-u(r)/2} h`.
    pub fn section(&self) -> DirectIntegralVector<F::Vector> {
        DirectIntegralVector::new(self.half.par_iter().map(|&c| self.scaled_h(c)).collect())
    }

    /// `β(g)(r) = e^{-u(r)/2} (T_r(g) h - h)` for `g` in the nilpotent part.
    pub fn cocycle(&self, g: &F::Group) -> DirectIntegralVector<F::Vector> {
        let nodes = self.grid().nodes();
        DirectIntegralVector::new(
            (0..nodes.len())
                .into_par_iter()
                .map(|i| {
                    let th = self.fam.apply(nodes[i], g, &self.h);
                    let c = Complex64::new(self.half[i], 0.0);
                    self.fam.combine(&[(c, &th), (-c, &self.h)])
                })
                .collect(),
        )
    }

    /// `||β(g)||^2` through the family's defect, without forming `β(g)`.
    pub fn cocycle_norm_sq(&self, g: &F::Group) -> f64 {
        let nodes = self.grid().nodes();
        let vals: Vec<f64> = (0..nodes.len())
            .into_par_iter()
            .map(|i| self.half[i] * self.half[i] * self.fam.defect_sq(nodes[i], g, &self.h))
            .collect();
        self.grid().integrate(&vals)
    }

    /// See [`tilde_apply`].
    pub fn tilde_apply(
        &self,
        p: &Scaled<F::Group>,
        f: &DirectIntegralVector<F::Vector>,
    ) -> Result<Shifted<F::Vector>> {
        tilde_apply(self.fam, self.grid(), p, f)
    }

    /// `β(p) = T~(p) f - f`, evaluated in closed form at every node:
    /// `e^{-u(r r0)/2} T_r(g) h - e^{-u(r)/2} h`.
    pub fn full_cocycle(&self, p: &Scaled<F::Group>) -> Result<DirectIntegralVector<F::Vector>> {
        self.grid().shift_of(p.scale)?;
        let nodes = self.grid().nodes();
        Ok(DirectIntegralVector::new(
            (0..nodes.len())
                .into_par_iter()
                .map(|i| {
                    let r = nodes[i];
                    let moved = self.meas.half_density(r * p.scale);
                    let th = self.fam.apply(r, &p.body, &self.h);
                    self.fam.combine(&[
                        (Complex64::new(moved, 0.0), &th),
                        (Complex64::new(-self.half[i], 0.0), &self.h),
                    ])
                })
                .collect(),
        ))
    }

    /// `||β(g1 g2) - T~(g1) β(g2) - β(g1)||` on the nilpotent part.
    pub fn cocycle_identity_defect(&self, g1: &F::Group, g2: &F::Group) -> f64 {
        let nodes = self.grid().nodes();
        let vals: Vec<f64> = (0..nodes.len())
            .into_par_iter()
            .map(|i| {
                let r = nodes[i];
                let c = Complex64::new(self.half[i], 0.0);
                let g12 = self.fam.mul(g1, g2);
                let a = self.fam.apply(r, &g12, &self.h);
                let b2 = self.fam.apply(r, g2, &self.h);
                let tb2 = self.fam.apply(r, g1, &b2);
                let th1 = self.fam.apply(r, g1, &self.h);
                let d = self.fam.combine(&[
                    (c, &a),
                    (-c, &self.h),
                    (-c, &tb2),
                    (c, &th1),
                    (-c, &th1),
                    (c, &self.h),
                ]);
                self.fam.norm_sq(&d)
            })
            .collect();
        self.grid().integrate(&vals).sqrt()
    }

    /// Cocycle identity for elements of the extended group, compared on the
    /// nodes where `T~(p1) β(p2)` is defined.
    pub fn scaled_identity_defect(
        &self,
        p1: &Scaled<F::Group>,
        p2: &Scaled<F::Group>,
    ) -> Result<IdentityDefect> {
        let b12 = self.full_cocycle(&scaled_mul(self.fam, p1, p2))?;
        let b1 = self.full_cocycle(p1)?;
        let shifted = self.tilde_apply(p1, &self.full_cocycle(p2)?)?;
        let d = DirectIntegralVector::combine(
            self.fam,
            &[(ONE, &b12), (-ONE, &shifted.vector), (-ONE, &b1)],
        );
        Ok(IdentityDefect {
            defect: d.norm_sq_on(self.fam, self.grid(), &[]).sqrt(),
            boundary_loss: shifted.discarded_norm_sq,
        })
    }

    /// Re-expresses the cocycle with `u0` in place of `u`: returns the
    /// representative built from `u0` and the coboundary section
    /// `(e^{-u/2} - e^{-u0/2}) h`, whose finite norm certifies
    /// `β ~ β_0`.
    pub fn cohomology_reduce(&self, u0: RadialProfile) -> Result<Reduction<'a, F>> {
        let meas0 = RadialMeasure::new(self.meas.grid.clone(), u0)?;
        let rep0 = CanonicalRep::new(self.fam, meas0, self.h.clone())?;
        let r_min = self.grid().r_min();
        let u_small = (self.meas.u.eval(r_min), rep0.meas.u.eval(r_min));
        let diff: Vec<f64> = self.half.iter().zip(&rep0.half).map(|(a, b)| a - b).collect();
        let h_sq = self.fam.norm_sq(&self.h);
        let integrand: Vec<f64> = diff.iter().map(|d| d * d * h_sq).collect();
        let tail = TailEstimate::fit(self.grid(), &integrand);
        if !tail.converges {
            return Err(Error::DivergentTail(format!(
                "coboundary integrand behaves like r^{:.3} near r = 0 (u({r_min:.3e}) = {:.3e}, u0 = {:.3e})",
                tail.alpha, u_small.0, u_small.1
            )));
        }
        let coboundary = DirectIntegralVector::new(
            diff.iter().map(|&d| self.scaled_h(d)).collect(),
        );
        let norm_sq = self.grid().integrate(&integrand) + tail.value;
        Ok(Reduction {
            representative: rep0,
            coboundary,
            norm: norm_sq.sqrt(),
            tail,
            u_small,
        })
    }
}

/// Output of [`CanonicalRep::cohomology_reduce`].
#[derive(Debug, Clone)]
pub struct Reduction<'a, F: RepFamily> {
    pub representative: CanonicalRep<'a, F>,
    pub coboundary: DirectIntegralVector<F::Vector>,
    /// Coboundary norm including the small-r tail estimate.
    pub norm: f64,
    pub tail: TailEstimate,
    /// `(u(r_min), u0(r_min))`.
    pub u_small: (f64, f64),
}
