use num_complex::Complex64;
use serde::Serialize;

use super::current::{current_mul, scale_part, CurrentElement};
use super::mc::moments;
use super::space::{BaseSpace, Configuration, Convention};
use crate::canonical::{RepFamily, Scaled};
use crate::error::{Error, Result};
use crate::heisenberg::{
    kernel_exponent, lambda_multiplier, matrix_of, rho_multiplier, CoherentCombo, DomainPoint,
    HeisElement, HeisenbergFamily, UnMatrix,
};
use crate::regular::McConfig;

/// `F(ω) = c · ⊗_{(r, x) ∈ ω} v(r, x)` at one configuration.
#[derive(Debug, Clone)]
pub struct TensorState<V> {
    pub config: Configuration,
    pub factors: Vec<V>,
    pub prefactor: Complex64,
}

impl<V> TensorState<V> {
    /// `⟨F, G⟩(ω) = c_F conj(c_G) Π ⟨v_i, w_i⟩`; both states must sit on the
    /// same configuration.
    pub fn inner<F: RepFamily<Vector = V>>(&self, fam: &F, other: &Self) -> Result<Complex64> {
        if self.config != other.config || self.factors.len() != other.factors.len() {
            return Err(Error::Shape("tensor states on different configurations".into()));
        }
        Ok(self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| fam.inner(a, b))
            .fold(self.prefactor * other.prefactor.conj(), |acc, z| acc * z))
    }

    /// `‖v_i - h‖` per factor.
    pub fn deviation_norms<F: RepFamily<Vector = V>>(&self, fam: &F, h: &V) -> Vec<f64> {
        let one = Complex64::new(1.0, 0.0);
        self.factors
            .iter()
            .map(|v| fam.norm_sq(&fam.combine(&[(one, v), (-one, h)])).sqrt())
            .collect()
    }
}

/// A product section `F_v` with `v(r, x) = (T~(g_k) … T~(g_1) v_0)(r, x)`
/// and prefactor `Π e^{∫ log r_j dm / 2}`, i.e. `U(g_k) … U(g_1) F_{v_0}`
/// for currents `g_j` valued in `R*_+ ⋉ G`.
pub struct CurrentSection<'a, F: RepFamily> {
    fam: &'a F,
    base: &'a (dyn Fn(f64, f64) -> F::Vector + Sync),
    ops: Vec<CurrentElement<Scaled<F::Group>>>,
}

impl<'a, F: RepFamily> Clone for CurrentSection<'a, F> {
    fn clone(&self) -> Self {
        Self {
            fam: self.fam,
            base: self.base,
            ops: self.ops.clone(),
        }
    }
}

impl<'a, F: RepFamily> CurrentSection<'a, F> {
    pub fn new(fam: &'a F, base: &'a (dyn Fn(f64, f64) -> F::Vector + Sync)) -> Self {
        Self {
            fam,
            base,
            ops: Vec::new(),
        }
    }

    pub fn operators(&self) -> &[CurrentElement<Scaled<F::Group>>] {
        &self.ops
    }

    /// `(T~(g) v)(r, x) = T_r(g(x)) v(r r_g(x), x)`, applied from the
    /// outermost operator inwards.
    pub fn eval(&self, r: f64, x: f64) -> F::Vector {
        self.eval_upto(self.ops.len(), r, x)
    }

    fn eval_upto(&self, k: usize, r: f64, x: f64) -> F::Vector {
        if k == 0 {
            return (self.base)(r, x);
        }
        let p = self.ops[k - 1].at(x);
        let inner = self.eval_upto(k - 1, r * p.scale, x);
        self.fam.apply(r, &p.body, &inner)
    }

    /// `Σ_j ∫ log r_j dm / 2`.
    pub fn log_prefactor(&self) -> f64 {
        self.ops.iter().map(|g| 0.5 * scale_part(g).log_integral()).sum()
    }

    pub fn state(&self, omega: &Configuration) -> TensorState<F::Vector> {
        TensorState {
            config: omega.clone(),
            factors: omega.points.iter().map(|&(r, x)| self.eval(r, x)).collect(),
            prefactor: Complex64::new(self.log_prefactor().exp(), 0.0),
        }
    }
}

/// `U(g) F_v = e^{∫ log r dm / 2} F_{T~(g) v}`.
pub fn current_apply<'a, F: RepFamily>(
    g: &CurrentElement<Scaled<F::Group>>,
    section: &CurrentSection<'a, F>,
) -> CurrentSection<'a, F> {
    let mut out = section.clone();
    out.ops.push(g.clone());
    out
}

/// `∫ ⟨F(ω), G(ω)⟩ dσ(ω)` as `E_ν[π(ω) ⟨F(ω), G(ω)⟩]` on the window.
pub fn qps_inner_mc<F: RepFamily>(
    space: &BaseSpace,
    convention: Convention,
    a: &CurrentSection<'_, F>,
    b: &CurrentSection<'_, F>,
    cfg: &McConfig,
) -> Result<(Complex64, f64)> {
    let fam = a.fam;
    let m = moments(cfg, 2, |rng| {
        let omega = space.sample(rng);
        let pi = space.quasi_weight(&omega, convention);
        let z = a.state(&omega).inner(fam, &b.state(&omega)).expect("same configuration");
        vec![pi * z.re, pi * z.im]
    })?;
    Ok((
        Complex64::new(m.mean[0], m.mean[1]),
        m.stderr(0).hypot(m.stderr(1)),
    ))
}

/// `e^{L} F_p`, `F_p(ω) = ⊗ (T~(p(x)) f)(r, x)` with `f(r) = e^{-r^2}`, i.e.
/// coherent factors `f_{p(x) v0}(r)`.
#[derive(Debug, Clone)]
pub struct PState {
    pub p: CurrentElement<Scaled<HeisElement>>,
    pub log_prefactor: Complex64,
}

/// `e^{L} F_g`, `F_g(ω) = ⊗ (T~(g(x)) f)(r, x) = ⊗ f_{g(x) v0}(r)`.
#[derive(Debug, Clone)]
pub struct UState {
    pub g: CurrentElement<UnMatrix>,
    pub log_prefactor: Complex64,
}

fn coherent_factors(points: &CurrentElement<DomainPoint>, omega: &Configuration) -> Vec<CoherentCombo> {
    omega.points.iter().map(|&(r, x)| points.at(x).fiber(r)).collect()
}

/// Exact `⟨e^{L_a} F_a, e^{L_b} F_b⟩` over `σ` for states with coherent
/// factors at points `v_a(x)`, `v_b(x)`: by Campbell's formula and
/// `∫ (e^{r^2 c} - e^{-2 r^2}) d*r = -(Log(-c) - ln 2) / 2`,
/// `exp(L_a + conj L_b - ∫ (Log(-c(v_a, v_b)) - ln 2) dm / 2)`.
pub fn coherent_inner(
    a: &CurrentElement<DomainPoint>,
    la: Complex64,
    b: &CurrentElement<DomainPoint>,
    lb: Complex64,
) -> Complex64 {
    let ln2 = std::f64::consts::LN_2;
    let exponent = a
        .zip_with(b, |v, w| -0.5 * ((-kernel_exponent(v, w)).ln() - ln2))
        .integral(|z| *z);
    (la + lb.conj() + exponent).exp()
}

impl PState {
    pub fn new(p: CurrentElement<Scaled<HeisElement>>) -> Self {
        Self {
            p,
            log_prefactor: Complex64::new(0.0, 0.0),
        }
    }

    pub fn points(&self) -> CurrentElement<DomainPoint> {
        self.p.map(|q| DomainPoint::base(q.body.dim()).transport(q))
    }

    pub fn state(&self, omega: &Configuration) -> TensorState<CoherentCombo> {
        TensorState {
            config: omega.clone(),
            factors: coherent_factors(&self.points(), omega),
            prefactor: self.log_prefactor.exp(),
        }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        coherent_inner(&self.points(), self.log_prefactor, &other.points(), other.log_prefactor)
    }

    pub fn to_unitary(&self) -> UState {
        UState {
            g: self.p.map(matrix_of),
            log_prefactor: self.log_prefactor,
        }
    }
}

/// `U(p0) F_p = e^{∫ log r0 dm / 2} F_{p0 p}`.
pub fn heis_current_apply(
    fam: &HeisenbergFamily,
    p0: &CurrentElement<Scaled<HeisElement>>,
    state: &PState,
) -> PState {
    PState {
        p: current_mul(fam, p0, &state.p),
        log_prefactor: state.log_prefactor + 0.5 * scale_part(p0).log_integral(),
    }
}

impl UState {
    pub fn new(g: CurrentElement<UnMatrix>) -> Self {
        Self {
            g,
            log_prefactor: Complex64::new(0.0, 0.0),
        }
    }

    pub fn points(&self) -> Result<CurrentElement<DomainPoint>> {
        let pts = self
            .g
            .values()
            .iter()
            .map(|g| crate::heisenberg::mobius_action(g, &DomainPoint::base(g.n() - 1)))
            .collect::<Result<Vec<_>>>()?;
        CurrentElement::new(self.g.cuts().to_vec(), pts)
    }

    pub fn state(&self, omega: &Configuration) -> Result<TensorState<CoherentCombo>> {
        Ok(TensorState {
            config: omega.clone(),
            factors: coherent_factors(&self.points()?, omega),
            prefactor: self.log_prefactor.exp(),
        })
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        Ok(coherent_inner(
            &self.points()?,
            self.log_prefactor,
            &other.points()?,
            other.log_prefactor,
        ))
    }
}

/// `U(g0) F_g = e^{∫ λ(g0(x), g(x)) dm} F_{g0 g}`.
pub fn un1_current_apply(g0: &CurrentElement<UnMatrix>, state: &UState) -> Result<UState> {
    let integral = g0
        .try_zip_with(&state.g, lambda_multiplier)?
        .integral(|l| *l);
    Ok(UState {
        g: g0.zip_with(&state.g, |a, b| a.mul(b)),
        log_prefactor: state.log_prefactor + integral,
    })
}

/// `∫_X ρ(g1(x), g2(x)) dm`.
pub fn rho_integral(g1: &CurrentElement<UnMatrix>, g2: &CurrentElement<UnMatrix>) -> Result<f64> {
    Ok(g1.try_zip_with(g2, rho_multiplier)?.integral(|r| *r))
}

/// Result of checking `U(g1 g2) F = e^{i ∫ρ} U(g1) U(g2) F` against probes.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectiveCheck {
    pub rho_integral: f64,
    /// Largest `|⟨U(g1 g2) F, P⟩ - e^{i ∫ρ} ⟨U(g1) U(g2) F, P⟩|` over probes.
    pub max_defect: f64,
    /// Largest `|⟨U(g) F, U(g) P⟩ - ⟨F, P⟩|` over probes for `g = g1`.
    pub max_isometry_defect: f64,
}

pub fn projective_check(
    g1: &CurrentElement<UnMatrix>,
    g2: &CurrentElement<UnMatrix>,
    state: &UState,
    probes: &[UState],
) -> Result<ProjectiveCheck> {
    let rho = rho_integral(g1, g2)?;
    let phase = Complex64::from_polar(1.0, rho);
    let direct = un1_current_apply(&g1.zip_with(g2, |a, b| a.mul(b)), state)?;
    let composed = un1_current_apply(g1, &un1_current_apply(g2, state)?)?;
    let mut max_defect: f64 = 0.0;
    let mut max_iso: f64 = 0.0;
    for probe in probes {
        let lhs = direct.inner(probe)?;
        let rhs = phase * composed.inner(probe)?;
        max_defect = max_defect.max((lhs - rhs).norm());
        let before = state.inner(probe)?;
        let after = un1_current_apply(g1, state)?.inner(&un1_current_apply(g1, probe)?)?;
        max_iso = max_iso.max((after - before).norm());
    }
    Ok(ProjectiveCheck {
        rho_integral: rho,
        max_defect,
        max_isometry_defect: max_iso,
    })
}
