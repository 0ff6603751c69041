use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::canonical::RadialProfile;
use crate::error::{Error, Result};

/// Cells of the inverse-CDF table in `ln r`.
pub const CDF_CELLS: usize = 8192;
/// Absolute target for window integrals in `ln r`.
pub const QUAD_TOL: f64 = 1e-13;

/// `∫_a^b φ(s) ds` by double-exponential quadrature, split at `breaks`.
pub(crate) fn integrate_log(phi: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&s| s > a && s < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.windows(2)
        .map(|w| quadrature::double_exponential::integrate(&phi, w[0], w[1], QUAD_TOL).integral)
        .sum()
}

/// Which density turns the Poisson measure `ν` into the quasi-Poisson `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `π(ω) = e^{-Σ u(r)}`.
    AsStated,
    /// `π(ω) = e^{+Σ u(r)}`, the density whose Campbell value is the
    /// characteristic functional `exp(∫ (e^{-f} - e^{-u}) d*r dm)`.
    Charfunc,
}

impl Convention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "as-stated" => Ok(Self::AsStated),
            "charfunc" => Ok(Self::Charfunc),
            _ => Err(Error::Config(format!(
                "unknown convention '{s}' (expected as-stated or charfunc)"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::AsStated => "as-stated",
            Self::Charfunc => "charfunc",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Self::AsStated => -1.0,
            Self::Charfunc => 1.0,
        }
    }
}

/// A finite configuration of points `(r, x)` in `R*_+ x [0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub points: Vec<(f64, f64)>,
}

impl Configuration {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `Y = R*_+ x X`, `X = [0, 1]` with Lebesgue measure, intensity
/// `e^{-u(r)} d*r dm(x)` restricted to `[r_min, r_max]`.
#[derive(Debug, Clone)]
pub struct BaseSpace {
    pub r_min: f64,
    pub r_max: f64,
    pub u: RadialProfile,
    mass: f64,
    /// Cumulative intensity at `ln r_min + i h`, normalized to end at 1.
    cdf: Vec<f64>,
}

impl BaseSpace {
    pub fn new(r_min: f64, r_max: f64, u: RadialProfile) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::Config(format!(
                "window needs 0 < r_min < r_max < inf, got [{r_min}, {r_max}]"
            )));
        }
        let (a, b) = (r_min.ln(), r_max.ln());
        let h = (b - a) / CDF_CELLS as f64;
        let mut dens = Vec::with_capacity(CDF_CELLS + 1);
        for i in 0..=CDF_CELLS {
            let r = (a + i as f64 * h).exp();
            let v = u.try_eval(r)?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("u({r:e}) = {v} must be finite and >= 0")));
            }
            dens.push((-v).exp());
        }
        let mut cdf = vec![0.0; CDF_CELLS + 1];
        for i in 0..CDF_CELLS {
            cdf[i + 1] = cdf[i] + 0.5 * h * (dens[i] + dens[i + 1]);
        }
        let total = cdf[CDF_CELLS];
        cdf.iter_mut().for_each(|c| *c /= total);
        let mut space = Self {
            r_min,
            r_max,
            u,
            mass: 0.0,
            cdf,
        };
        space.mass = space.integrate(|r| space.density(r), &[]);
        if !(space.mass > 0.0 && space.mass.is_finite()) {
            return Err(Error::Config(format!("window mass {} is not positive and finite", space.mass)));
        }
        Ok(space)
    }

    /// `u(r) = 2 r^2` on the given window.
    pub fn quadratic(r_min: f64, r_max: f64) -> Result<Self> {
        Self::new(r_min, r_max, RadialProfile::Quadratic)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    /// `e^{-u(r)}`.
    pub fn density(&self, r: f64) -> f64 {
        (-self.u.eval(r)).exp()
    }

    /// `Λ = ∫∫ e^{-u} d*r dm` over the window.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.r_min && r <= self.r_max
    }

    /// `∫_window φ(r) d*r` for `φ` smooth between the `r_breaks`.
    pub fn integrate(&self, phi: impl Fn(f64) -> f64, r_breaks: &[f64]) -> f64 {
        self.integrate_cells(&[0.0, 1.0], |r, _| phi(r), r_breaks)
    }

    /// `∫ φ(r, x) d*r dm` for `φ` constant in `x` on the cells of `cuts`
    /// (`0 = c_0 < … < c_k = 1`), evaluated at cell midpoints.
    pub fn integrate_cells(&self, cuts: &[f64], phi: impl Fn(f64, f64) -> f64, r_breaks: &[f64]) -> f64 {
        let breaks: Vec<f64> = r_breaks.iter().filter(|r| **r > 0.0).map(|r| r.ln()).collect();
        cuts.windows(2)
            .map(|w| {
                let x = 0.5 * (w[0] + w[1]);
                (w[1] - w[0]) * integrate_log(|s| phi(s.exp(), x), self.r_min.ln(), self.r_max.ln(), &breaks)
            })
            .sum()
    }

    /// Radius with normalized cumulative intensity `q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= q).clamp(1, CDF_CELLS);
        let (lo, hi) = (self.cdf[i - 1], self.cdf[i]);
        let t = if hi > lo { (q - lo) / (hi - lo) } else { 0.5 };
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        let h = (b - a) / CDF_CELLS as f64;
        (a + (i as f64 - 1.0 + t.clamp(0.0, 1.0)) * h).exp()
    }

    /// Normalized cumulative intensity of `(r_min, r]` from the table.
    pub fn cdf(&self, r: f64) -> f64 {
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        let pos = ((r.ln() - a) / (b - a) * CDF_CELLS as f64).clamp(0.0, CDF_CELLS as f64);
        let i = (pos.floor() as usize).min(CDF_CELLS - 1);
        let t = pos - i as f64;
        self.cdf[i] + t * (self.cdf[i + 1] - self.cdf[i])
    }

    /// A Poisson configuration: `Poisson(Λ)` points, radii by inverse CDF,
    /// `x` uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        let count = Poisson::new(self.mass).expect("positive mass").sample(rng) as usize;
        Configuration::new(
            (0..count)
                .map(|_| (self.quantile(rng.gen::<f64>()), rng.gen::<f64>()))
                .collect(),
        )
    }

    /// `π(ω) = e^{∓ Σ u(r)}`.
    pub fn quasi_weight(&self, omega: &Configuration, convention: Convention) -> f64 {
        let s: f64 = omega.points.iter().map(|&(r, _)| self.u.eval(r)).sum();
        (convention.sign() * s).exp()
    }
}
