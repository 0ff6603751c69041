use serde::Serialize;

use super::current::CurrentElement;
use super::mc::moments;
use super::space::{BaseSpace, Configuration, Convention};
use crate::canonical::RadialProfile;
use crate::error::{Error, Result};
use crate::regular::McConfig;

/// Largest relative gap, through the window edges, between the windowed
/// prediction of the Radon–Nikodym factor and `e^{∫ log r dm}`.
pub const LEAKAGE_BOUND: f64 = 1e-3;
/// Agreement threshold in combined standard errors.
pub const Z_MAX: f64 = 3.0;

/// One radial summand of a test function.
#[derive(Debug, Clone)]
pub enum RadialTerm {
    Profile(RadialProfile),
    /// `c` on `[lo, hi)`, zero elsewhere.
    Indicator { c: f64, lo: f64, hi: f64 },
}

impl RadialTerm {
    fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Profile(p) => p.eval(r),
            Self::Indicator { c, lo, hi } => {
                if r >= *lo && r < *hi {
                    *c
                } else {
                    0.0
                }
            }
        }
    }
}

/// Radial part on one cell of `X`: `f(r) = Σ term(r · dilation)`.
#[derive(Debug, Clone)]
pub struct Piece {
    pub terms: Vec<RadialTerm>,
    pub dilation: f64,
}

impl Piece {
    pub fn eval(&self, r: f64) -> f64 {
        let s = r * self.dilation;
        self.terms.iter().map(|t| t.eval(s)).sum()
    }

    fn breaks(&self) -> Vec<f64> {
        self.terms
            .iter()
            .flat_map(|t| match t {
                RadialTerm::Indicator { lo, hi, .. } => vec![lo / self.dilation, hi / self.dilation],
                RadialTerm::Profile(_) => vec![],
            })
            .collect()
    }
}

/// A nonnegative function on `Y`, smooth in `r` between known breaks and
/// constant in `x` on cells.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub label: String,
    pub cells: CurrentElement<Piece>,
}

impl TestFunction {
    pub fn radial(label: &str, terms: Vec<RadialTerm>) -> Self {
        Self {
            label: label.into(),
            cells: CurrentElement::constant(Piece {
                terms,
                dilation: 1.0,
            }),
        }
    }

    pub fn zero() -> Self {
        Self::radial("0", vec![])
    }

    pub fn stepped(label: &str, cuts: Vec<f64>, terms: Vec<Vec<RadialTerm>>) -> Result<Self> {
        Ok(Self {
            label: label.into(),
            cells: CurrentElement::new(
                cuts,
                terms
                    .into_iter()
                    .map(|t| Piece {
                        terms: t,
                        dilation: 1.0,
                    })
                    .collect(),
            )?,
        })
    }

    pub fn eval(&self, r: f64, x: f64) -> f64 {
        self.cells.at(x).eval(r)
    }

    /// `Σ_{(r, x) ∈ ω} f(r, x)`.
    pub fn sum_over(&self, omega: &Configuration) -> f64 {
        omega.points.iter().map(|&(r, x)| self.eval(r, x)).sum()
    }

    /// `(r, x) -> f(s(x) r, x)`.
    pub fn precomposed(&self, s: &CurrentElement<f64>) -> Self {
        Self {
            label: format!("{}∘scale", self.label),
            cells: self.cells.zip_with(s, |p, k| Piece {
                terms: p.terms.clone(),
                dilation: p.dilation * k,
            }),
        }
    }

    /// `∫∫ φ(f(r, x), r) d*r dm` over the window.
    fn integrate(&self, space: &BaseSpace, phi: impl Fn(f64, f64) -> f64) -> f64 {
        self.cells
            .cells()
            .map(|(w, p)| w * space.integrate(|r| phi(p.eval(r), r), &p.breaks()))
            .sum()
    }
}

/// `exp(∫ (e^{-f} - e^{-u}) d*r dm)` over the window.
pub fn charfunc_analytic(space: &BaseSpace, f: &TestFunction) -> Result<f64> {
    let v = f.integrate(space, |fv, r| (-fv).exp() - space.density(r)).exp();
    if !v.is_finite() {
        return Err(Error::Integration(format!("characteristic functional of {} is not finite", f.label)));
    }
    Ok(v)
}

/// Campbell value of `E_ν[π(ω) e^{-Σ f}]` under a convention:
/// `exp(∫ (e^{∓u - f} - 1) e^{-u} d*r dm)`.
pub fn campbell_value(space: &BaseSpace, f: &TestFunction, convention: Convention) -> f64 {
    match convention {
        Convention::Charfunc => f.integrate(space, |fv, r| (-fv).exp() - space.density(r)).exp(),
        Convention::AsStated => f
            .integrate(space, |fv, r| {
                let e = space.density(r);
                ((-fv).exp() * e - 1.0) * e
            })
            .exp(),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// `∫ e^{-Σ f} dσ` as `E_ν[π(ω) e^{-Σ f}]` over Poisson configurations.
pub fn charfunc_mc(
    space: &BaseSpace,
    f: &TestFunction,
    convention: Convention,
    cfg: &McConfig,
) -> Result<McEstimate> {
    let m = moments(cfg, 1, |rng| {
        let omega = space.sample(rng);
        vec![space.quasi_weight(&omega, convention) * (-f.sum_over(&omega)).exp()]
    })?;
    let out = McEstimate {
        estimate: m.mean[0],
        stderr: m.stderr(0),
        samples: m.samples,
    };
    if let Some(target) = cfg.target_stderr {
        if out.stderr > target * out.estimate.abs().max(1.0) {
            return Err(Error::McBudget {
                stderr: out.stderr,
                target,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RnEntry {
    pub label: String,
    /// `E_σ[Φ(r~^{-1} ω)] / E_σ[Φ(ω)]`.
    pub ratio: f64,
    pub stderr: f64,
    /// The same ratio from Campbell's formula on the window.
    pub windowed: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RnReport {
    /// `e^{∫ log r dm}`.
    pub predicted: f64,
    pub leakage: f64,
    pub entries: Vec<RnEntry>,
}

impl RnReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Checks `dσ(r~ ω) = e^{∫ log r dm} dσ(ω)` in the form
/// `E_σ[Φ(r~^{-1} ω)] = e^{∫ log r dm} E_σ[Φ(ω)]` for `Φ = e^{-Σ f}`, with
/// both expectations on common Poisson samples (charfunc convention).
pub fn radon_nikodym_check(
    space: &BaseSpace,
    scale: &CurrentElement<f64>,
    battery: &[TestFunction],
    cfg: &McConfig,
) -> Result<RnReport> {
    let predicted = scale.log_integral().exp();
    let inverse = scale.map(|r| 1.0 / r);
    let moved: Vec<TestFunction> = battery.iter().map(|f| f.precomposed(&inverse)).collect();
    let mut leakage: f64 = 0.0;
    let mut windowed = Vec::new();
    for (f, g) in battery.iter().zip(&moved) {
        let w = campbell_value(space, g, Convention::Charfunc) / campbell_value(space, f, Convention::Charfunc);
        leakage = leakage.max((w / predicted - 1.0).abs());
        windowed.push(w);
    }
    if leakage > LEAKAGE_BOUND {
        return Err(Error::Leakage(format!(
            "window [{:e}, {:e}] changes the predicted factor by {leakage:e}",
            space.r_min, space.r_max
        )));
    }
    let k = battery.len();
    let m = moments(cfg, 2 * k, |rng| {
        let omega = space.sample(rng);
        let pi = space.quasi_weight(&omega, Convention::Charfunc);
        let mut v = Vec::with_capacity(2 * k);
        for (f, g) in battery.iter().zip(&moved) {
            v.push(pi * (-g.sum_over(&omega)).exp());
            v.push(pi * (-f.sum_over(&omega)).exp());
        }
        v
    })?;
    let entries = battery
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (a, b) = (m.mean[2 * i], m.mean[2 * i + 1]);
            let ratio = a / b;
            let rel = m.cov[2 * i][2 * i] / (a * a) + m.cov[2 * i + 1][2 * i + 1] / (b * b)
                - 2.0 * m.cov[2 * i][2 * i + 1] / (a * b);
            let stderr = ratio * (rel.max(0.0) / m.samples as f64).sqrt();
            let z = (ratio - predicted) / stderr.max(f64::MIN_POSITIVE);
            RnEntry {
                label: f.label.clone(),
                ratio,
                stderr,
                windowed: windowed[i],
                z,
                pass: z.abs() <= Z_MAX,
            }
        })
        .collect();
    Ok(RnReport {
        predicted,
        leakage,
        entries,
    })
}
