use num_complex::Complex64;

use super::gaussian::GaussianVector;
use super::overlap::RegularRep;
use crate::canonical::{CanonicalRep, RadialMeasure, RepFamily};
use crate::error::{Error, Result};
use crate::lie_core::Element;

/// Translates closer than this (max-norm) are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// One term `c · T(t) F_{μ_form}`.
#[derive(Debug, Clone)]
pub struct TranslateTerm {
    pub coef: Complex64,
    pub form: usize,
    pub translate: Element<f64>,
}

/// A finite combination of translated Gaussians.
#[derive(Debug, Clone, Default)]
pub struct TranslateCombo {
    pub terms: Vec<TranslateTerm>,
}

impl TranslateCombo {
    /// `F_{μ_form}` itself.
    pub fn gaussian(form: usize, dim: usize) -> Self {
        Self {
            terms: vec![TranslateTerm {
                coef: Complex64::new(1.0, 0.0),
                form,
                translate: Element::zero(dim),
            }],
        }
    }
}

/// The conjugate family `T_r(g) = T(g^r)` of the regular representation
/// acting on combinations of translated Gaussians, with inner products in
/// closed form. Class `<= 2`.
#[derive(Debug, Clone)]
pub struct RegularFamily {
    pub rep: RegularRep,
    /// Gaussian forms the combinations may reference; index 0 is the
    /// reference vector.
    pub forms: Vec<GaussianVector>,
}

impl RegularFamily {
    pub fn new(rep: RegularRep, extra: Vec<GaussianVector>) -> Result<Self> {
        if rep.algebra().class() > 2 {
            return Err(Error::ClassTooLarge(rep.algebra().class()));
        }
        let mut forms = vec![rep.reference().clone()];
        forms.extend(extra);
        Ok(Self { rep, forms })
    }

    pub fn gaussian(&self, form: usize) -> TranslateCombo {
        TranslateCombo::gaussian(form, self.rep.algebra().dim())
    }

    fn pair(&self, a: &TranslateTerm, b: &TranslateTerm) -> f64 {
        // ⟨T(t1)F_i, T(t2)F_j⟩ = ⟨T(t2^{-1} t1)F_i, F_j⟩
        let alg = self.rep.algebra();
        let s = alg.group_mul(&b.translate.neg(), &a.translate).expect("same algebra");
        self.rep
            .log_pair(&self.forms[a.form], &self.forms[b.form], &s)
            .expect("class <= 2")
            .exp()
    }
}

impl RepFamily for RegularFamily {
    type Group = Element<f64>;
    type Vector = TranslateCombo;

    fn identity(&self) -> Element<f64> {
        self.rep.algebra().zero()
    }

    fn mul(&self, a: &Element<f64>, b: &Element<f64>) -> Element<f64> {
        self.rep.algebra().group_mul(a, b).expect("same algebra")
    }

    fn inv(&self, a: &Element<f64>) -> Element<f64> {
        a.neg()
    }

    fn dilate(&self, r: f64, g: &Element<f64>) -> Element<f64> {
        self.rep.algebra().dilate(&r, g).expect("positive scale")
    }

    /// `T(g) T(t) F = T(g t) F`.
    fn act(&self, g: &Element<f64>, v: &TranslateCombo) -> TranslateCombo {
        TranslateCombo {
            terms: v
                .terms
                .iter()
                .map(|t| TranslateTerm {
                    coef: t.coef,
                    form: t.form,
                    translate: self.mul(g, &t.translate),
                })
                .collect(),
        }
    }

    fn combine(&self, terms: &[(Complex64, &TranslateCombo)]) -> TranslateCombo {
        let mut out: Vec<TranslateTerm> = Vec::new();
        for (c, v) in terms {
            for t in &v.terms {
                let coef = c * t.coef;
                match out
                    .iter_mut()
                    .find(|o| o.form == t.form && o.translate.sub(&t.translate).max_abs() <= MERGE_TOL)
                {
                    Some(o) => o.coef += coef,
                    None => out.push(TranslateTerm {
                        coef,
                        form: t.form,
                        translate: t.translate.clone(),
                    }),
                }
            }
        }
        out.retain(|t| t.coef != Complex64::new(0.0, 0.0));
        TranslateCombo { terms: out }
    }

    fn inner(&self, a: &TranslateCombo, b: &TranslateCombo) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ta in &a.terms {
            for tb in &b.terms {
                acc += ta.coef * tb.coef.conj() * self.pair(ta, tb);
            }
        }
        acc
    }

    /// Single-term vectors use `2 ||F||^2 (1 - overlap / ||F||^2)` with the
    /// bracket evaluated through `expm1`.
    fn defect_sq(&self, r: f64, g: &Element<f64>, h: &TranslateCombo) -> f64 {
        if let [t] = h.terms.as_slice() {
            let alg = self.rep.algebra();
            let gr = self.dilate(r, g);
            let inner_shift = alg
                .group_mul(&alg.group_mul(&t.translate.neg(), &gr).expect("same algebra"), &t.translate)
                .expect("same algebra");
            let f = &self.forms[t.form];
            let ln_norm = self.rep.log_pair(f, f, &alg.zero()).expect("class <= 2");
            let ln_overlap = self.rep.log_pair(f, f, &inner_shift).expect("class <= 2");
            return 2.0 * t.coef.norm_sqr() * ln_norm.exp() * (-(ln_overlap - ln_norm).exp_m1());
        }
        let th = self.apply(r, g, h);
        let one = Complex64::new(1.0, 0.0);
        self.norm_sq(&self.combine(&[(one, &th), (-one, h)]))
    }
}

/// The cocycle `β_μ` of the regular representation: the canonical
/// special representation built on `h = F_μ` (the reference vector).
pub fn regular_cocycle(fam: &RegularFamily, meas: RadialMeasure) -> Result<CanonicalRep<'_, RegularFamily>> {
    CanonicalRep::new(fam, meas, fam.gaussian(0))
}
