use num_complex::Complex64;

use super::group::{bilinear, hermitian, norm_sq, HeisElement};
use crate::canonical::{DirectIntegralVector, RadialGrid, RepFamily, Scaled};
use crate::error::{Error, Result};

/// Exponent vectors closer than this (max-norm) are merged.
pub const MERGE_TOL: f64 = 1e-12;
/// Points with `a + conj(a) + |b|^2 > -NEAR_BOUNDARY` are rejected.
pub const NEAR_BOUNDARY: f64 = 1e-12;

/// A finite combination `sum_j c_j e^{(z, b_j)}` of Fock-space coherent
/// states, held exactly.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoherentCombo {
    pub terms: Vec<(Complex64, Vec<Complex64>)>,
}

impl CoherentCombo {
    pub fn single(coef: Complex64, b: Vec<Complex64>) -> Self {
        Self {
            terms: vec![(coef, b)],
        }
    }

    /// The constant function 1.
    pub fn vacuum(m: usize) -> Self {
        Self::single(Complex64::new(1.0, 0.0), vec![Complex64::new(0.0, 0.0); m])
    }
}

/// The Fock representation `(T(ζ0, z0) f)(z) = e^{ζ0 - (z, conj z0)} f(z + z0)`
/// of the Heisenberg group, with conjugates `T_r(g) = T(g^r)`, acting on
/// exact coherent combinations.
///
/// `T(ζ0, z0) e^{(z, b)} = e^{ζ0 + (z0, b)} e^{(z, b - conj z0)}` and
/// `⟨e^{(z, b)}, e^{(z, b')}⟩ = e^{(b, conj b')}`.
#[derive(Debug, Clone, Copy)]
pub struct HeisenbergFamily {
    pub m: usize,
}

impl HeisenbergFamily {
    /// Family for the Heisenberg group of order `2n - 1`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("Heisenberg order needs n >= 2, got {n}")));
        }
        Ok(Self { m: n - 1 })
    }

    pub fn vacuum(&self) -> CoherentCombo {
        CoherentCombo::vacuum(self.m)
    }
}

impl RepFamily for HeisenbergFamily {
    type Group = HeisElement;
    type Vector = CoherentCombo;

    fn identity(&self) -> HeisElement {
        HeisElement::identity(self.m)
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

    fn act(&self, g: &HeisElement, v: &CoherentCombo) -> CoherentCombo {
        CoherentCombo {
            terms: v
                .terms
                .iter()
                .map(|(c, b)| {
                    let coef = c * (g.zeta + bilinear(&g.z, b)).exp();
                    let nb = b.iter().zip(&g.z).map(|(bi, zi)| bi - zi.conj()).collect();
                    (coef, nb)
                })
                .collect(),
        }
    }

    fn combine(&self, terms: &[(Complex64, &CoherentCombo)]) -> CoherentCombo {
        let mut out: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
        for (c, v) in terms {
            for (tc, tb) in &v.terms {
                let coef = c * tc;
                let close = |b: &Vec<Complex64>| {
                    b.iter().zip(tb).all(|(x, y)| (x - y).norm() <= MERGE_TOL)
                };
                match out.iter_mut().find(|(_, b)| close(b)) {
                    Some((oc, _)) => *oc += coef,
                    None => out.push((coef, tb.clone())),
                }
            }
        }
        out.retain(|(c, _)| *c != Complex64::new(0.0, 0.0));
        CoherentCombo { terms: out }
    }

    fn inner(&self, a: &CoherentCombo, b: &CoherentCombo) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ca, ba) in &a.terms {
            for (cb, bb) in &b.terms {
                acc += ca * cb.conj() * hermitian(ba, bb).exp();
            }
        }
        acc
    }

    /// For one term `c e^{(z, b)}`:
    /// `2 |c|^2 e^{|b|^2} (1 - e^{Re ζ} cos(Im ζ + 2 Im (z0, b)))`, with the
    /// bracket split as `-expm1(x) + 2 e^x sin^2(y / 2)`.
    fn defect_sq(&self, r: f64, g: &HeisElement, h: &CoherentCombo) -> f64 {
        if let [(c, b)] = h.terms.as_slice() {
            let gr = g.dilate(r);
            let x = gr.zeta.re;
            let y = gr.zeta.im + 2.0 * bilinear(&gr.z, b).im;
            let bracket = -x.exp_m1() + 2.0 * x.exp() * (0.5 * y).sin().powi(2);
            return 2.0 * c.norm_sqr() * norm_sq(b).exp() * bracket;
        }
        let th = self.apply(r, g, h);
        let one = Complex64::new(1.0, 0.0);
        self.norm_sq(&self.combine(&[(one, &th), (-one, h)]))
    }
}

/// A point `(a, b)` of the domain `a + conj(a) + |b|^2 < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPoint {
    pub a: Complex64,
    pub b: Vec<Complex64>,
}

impl DomainPoint {
    pub fn new(a: Complex64, b: Vec<Complex64>) -> Result<Self> {
        let v = Self { a, b };
        let gap = v.gap();
        if !(gap > NEAR_BOUNDARY) {
            return Err(Error::NearBoundary(format!(
                "a + conj(a) + |b|^2 = {:e}",
                -gap
            )));
        }
        Ok(v)
    }

    /// `v0 = (-1, 0)`.
    pub fn base(m: usize) -> Self {
        Self {
            a: Complex64::new(-1.0, 0.0),
            b: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    /// `-(a + conj(a) + |b|^2)`, positive inside the domain.
    pub fn gap(&self) -> f64 {
        -(2.0 * self.a.re + norm_sq(&self.b))
    }

    /// The fiber of `f_v` at radius `r`: `e^{r^2 a} e^{(z, r b)}`.
    pub fn fiber(&self, r: f64) -> CoherentCombo {
        CoherentCombo::single(
            (self.a * (r * r)).exp(),
            self.b.iter().map(|c| c * r).collect(),
        )
    }

    /// Image under `T~(r0, ζ0, z0)`: `(r0^2 a + ζ0 + r0 (z0, b), r0 b - conj z0)`.
    pub fn transport(&self, p: &Scaled<HeisElement>) -> DomainPoint {
        let (s, g) = (p.scale, &p.body);
        let b: Vec<Complex64> = self.b.iter().map(|c| c * s).collect();
        DomainPoint {
            a: self.a * (s * s) + g.zeta + bilinear(&g.z, &b),
            b: b.iter().zip(&g.z).map(|(bi, zi)| bi - zi.conj()).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.b
            .iter()
            .zip(&other.b)
            .map(|(x, y)| (x - y).norm())
            .fold((self.a - other.a).norm(), f64::max)
    }
}

/// `c(v, w) = a_v + conj(a_w) + (b_v, conj b_w)`: `⟨f_v(r), f_w(r)⟩ = e^{r^2 c(v, w)}`.
pub fn kernel_exponent(v: &DomainPoint, w: &DomainPoint) -> Complex64 {
    v.a + w.a.conj() + hermitian(&v.b, &w.b)
}

/// The section `f_v(r, z) = e^{r^2 a + r (z, b)}` on the grid.
pub fn coherent_vector(v: &DomainPoint, grid: &RadialGrid) -> DirectIntegralVector<CoherentCombo> {
    DirectIntegralVector::new(grid.nodes().iter().map(|&r| v.fiber(r)).collect())
}

/// A symbolic combination `sum_j κ_j f_{v_j}` of coherent sections.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentCombination {
    pub terms: Vec<(Complex64, DomainPoint)>,
}

impl CoherentCombination {
    pub fn single(v: DomainPoint) -> Self {
        Self {
            terms: vec![(Complex64::new(1.0, 0.0), v)],
        }
    }

    /// `f_{v1} - f_{v2}`.
    pub fn difference(v1: DomainPoint, v2: DomainPoint) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            terms: vec![(one, v1), (-one, v2)],
        }
    }

    pub fn total_weight(&self) -> Complex64 {
        self.terms.iter().map(|t| t.0).sum()
    }

    /// Whether the combination has finite norm in the direct integral
    /// (weights summing to zero).
    pub fn is_difference(&self) -> bool {
        self.total_weight().norm() <= 1e-12 * self.terms.iter().map(|t| t.0.norm()).sum::<f64>().max(1.0)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            terms: self.terms.iter().map(|(c, v)| (c * s, v.clone())).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn section(&self, grid: &RadialGrid) -> DirectIntegralVector<CoherentCombo> {
        let fam = HeisenbergFamily { m: self.terms[0].1.b.len() };
        DirectIntegralVector::new(
            grid.nodes()
                .iter()
                .map(|&r| {
                    let fibers: Vec<(Complex64, CoherentCombo)> =
                        self.terms.iter().map(|(c, v)| (*c, v.fiber(r))).collect();
                    let refs: Vec<(Complex64, &CoherentCombo)> = fibers.iter().map(|(c, f)| (*c, f)).collect();
                    fam.combine(&refs)
                })
                .collect(),
        )
    }

    /// `T~(p)` for `p ∈ P`, through the transported points.
    pub fn transport(&self, p: &Scaled<HeisElement>) -> Self {
        Self {
            terms: self.terms.iter().map(|(c, v)| (*c, v.transport(p))).collect(),
        }
    }
}

/// Exact inner product in `∫ K_r d*r` of two coherent combinations, at
/// least one with weights summing to zero:
/// `∫_0^∞ sum κ_j conj(λ_k) e^{r^2 c_jk} d*r = -1/2 sum κ_j conj(λ_k) Log(-c_jk)`.
pub fn direct_inner(x: &CoherentCombination, y: &CoherentCombination) -> Result<Complex64> {
    if !(x.is_difference() || y.is_difference()) {
        return Err(Error::DivergentTail(
            "inner product of two non-difference coherent combinations diverges at r = 0".into(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (k1, v) in &x.terms {
        for (k2, w) in &y.terms {
            acc += k1 * k2.conj() * (-kernel_exponent(v, w)).ln();
        }
    }
    Ok(-0.5 * acc)
}

/// `‖f_v - f_w‖^2 = ln(|c(v, w)|^2 / (c(v, v) c(w, w))) / 2`, with the ratio
/// expanded in differences of the two points so that nearby points do not
/// cancel:
/// `|c_vw|^2 - c_vv c_ww = (g_v - g_w)^2 / 4 + (g_v + g_w) |Δb|^2 / 2 + |Δb|^4 / 4 + (Im c_vw)^2`
/// where `g = -(a + conj a + |b|^2)`.
pub fn difference_norm_sq(v: &DomainPoint, w: &DomainPoint) -> f64 {
    let (gv, gw) = (v.gap(), w.gap());
    let db: Vec<Complex64> = v.b.iter().zip(&w.b).map(|(x, y)| x - y).collect();
    let db2 = norm_sq(&db);
    let im = (v.a - w.a).im + hermitian(&db, &w.b).im;
    let num = 0.25 * (gv - gw).powi(2) + 0.5 * (gv + gw) * db2 + 0.25 * db2 * db2 + im * im;
    0.5 * (num / (gv * gw)).ln_1p()
}

impl CoherentCombination {
    /// Merges terms at identical points and drops zero weights.
    pub fn simplified(&self) -> Self {
        let mut out: Vec<(Complex64, DomainPoint)> = Vec::new();
        for (k, v) in &self.terms {
            match out.iter_mut().find(|(_, w)| w == v) {
                Some((acc, _)) => *acc += k,
                None => out.push((*k, v.clone())),
            }
        }
        out.retain(|(k, _)| k.norm() != 0.0);
        Self { terms: out }
    }

    /// `‖x‖^2`, after merging identical points; a remaining pair `κ (f_v - f_w)`
    /// uses [`difference_norm_sq`].
    pub fn norm_sq(&self) -> Result<f64> {
        let s = self.simplified();
        match s.terms.as_slice() {
            [] => Ok(0.0),
            [(k1, v), (k2, w)] if (k1 + k2).norm() <= 1e-15 * k1.norm() => {
                Ok(k1.norm_sqr() * difference_norm_sq(v, w))
            }
            _ => Ok(direct_inner(&s, &s)?.re.max(0.0)),
        }
    }
}
