use num_complex::Complex64;

use super::coherent::DomainPoint;
use super::fock::{FockTruncation, FockVector};
use super::group::HeisElement;
use crate::canonical::{tilde_apply, DirectIntegralVector, RadialGrid, RepFamily, Scaled, Shifted};
use crate::error::Result;

/// The Fock family `T_r(g) = T(g^r)` on a fixed truncation. `apply` is
/// `P_D T(g^r) P_D`, so it is unitary only up to the truncation leakage.
#[derive(Debug, Clone)]
pub struct FockFamily {
    pub trunc: FockTruncation,
}

impl RepFamily for FockFamily {
    type Group = HeisElement;
    type Vector = FockVector;

    fn identity(&self) -> HeisElement {
        HeisElement::identity(self.trunc.m())
    }

    fn mul(&self, a: &HeisElement, b: &HeisElement) -> HeisElement {
        a.mul(b)
    }

    fn inv(&self, a: &HeisElement) -> HeisElement {
        a.inv()
    }

    fn dilate(&self, r: f64, g: &HeisElement) -> HeisElement {
        g.dilate(r)
    }

    fn act(&self, g: &HeisElement, v: &FockVector) -> FockVector {
        self.trunc.apply(g, v)
    }

    fn combine(&self, terms: &[(Complex64, &FockVector)]) -> FockVector {
        let mut out = self.trunc.zero();
        for (c, v) in terms {
            for (o, x) in out.coeffs.iter_mut().zip(&v.coeffs) {
                *o += c * x;
            }
        }
        out
    }

    fn inner(&self, a: &FockVector, b: &FockVector) -> Complex64 {
        self.trunc.inner(a, b)
    }
}

/// `T~(r0, ζ0, z0)` on truncated Fock sections: index shift by `r0`, then
/// `T(r^2 ζ0, r z0)` at each node `r`.
pub fn special_apply(
    trunc: &FockTruncation,
    grid: &RadialGrid,
    p: &Scaled<HeisElement>,
    f: &DirectIntegralVector<FockVector>,
) -> Result<Shifted<FockVector>> {
    let fam = FockFamily {
        trunc: trunc.clone(),
    };
    tilde_apply(&fam, grid, p, f)
}

/// `f_v` on the grid as truncated Fock vectors: `e^{r^2 a}` times the
/// degree-`D` expansion of `e^{(z, r b)}`.
pub fn coherent_fock_vector(
    trunc: &FockTruncation,
    v: &DomainPoint,
    grid: &RadialGrid,
) -> DirectIntegralVector<FockVector> {
    DirectIntegralVector::new(
        grid.nodes()
            .iter()
            .map(|&r| {
                let b: Vec<Complex64> = v.b.iter().map(|c| c * r).collect();
                let mut e = trunc.exponential(&b);
                let s = (v.a * (r * r)).exp();
                e.coeffs.iter_mut().for_each(|c| *c *= s);
                e
            })
            .collect(),
    )
}
