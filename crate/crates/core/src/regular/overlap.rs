use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::gaussian::{log_det, GaussianVector};
use super::shift::ShiftPolynomials;
use crate::canonical::{RadialMeasure, TailEstimate};
use crate::error::{Error, Result};
use crate::lie_core::Element;
use crate::numeric::{fit_line, fit_line_with_power, pairwise_sum, LineFit};
use crate::Algebra;

/// Which evaluation produced an overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapPath {
    Exact,
    MonteCarlo,
}

/// `⟨T_r(b) F, F⟩` together with `1 - ⟨T_r(b) F, F⟩` computed without
/// cancellation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Overlap {
    pub value: f64,
    pub deficit: f64,
    /// Zero on the exact path.
    pub stderr: f64,
    pub samples: usize,
    pub path: OverlapPath,
}

/// Monte Carlo settings: `samples` draws split into `batches` independent
/// ChaCha streams of one seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub batches: usize,
    pub seed: u64,
    /// Fail when the standard error of the overlap exceeds this.
    pub target_stderr: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            batches: 64,
            seed: 0,
            target_stderr: Some(1e-4),
        }
    }
}

/// Fit window for the small-r exponent.
pub const EXPONENT_WINDOW: (f64, f64) = (-5.0, -2.0);
const EXPONENT_POINTS: usize = 16;

/// Summability integral of `(1 - overlap)^{1/2}` against the cocycle
/// measure, with the small-r continuation.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub integral: f64,
    pub tail: TailEstimate,
    pub total: f64,
}

/// The regular representation `(T(g) f)(a) = f(a·g)` on `L^2(N)` with
/// Lebesgue measure rescaled so that the reference vector has unit norm.
#[derive(Debug, Clone)]
pub struct RegularRep {
    alg: Algebra,
    reference: GaussianVector,
    /// `W_k` with `W_k z ~ N(0, (4 μ_k)^{-1})` for standard normal `z`.
    samplers: Vec<DMatrix<f64>>,
}

impl RegularRep {
    pub fn new(alg: Algebra, reference: GaussianVector) -> Result<Self> {
        if reference.forms().len() != alg.class() {
            return Err(Error::Shape("reference forms do not match the algebra".into()));
        }
        let samplers = (1..=alg.class())
            .map(|k| {
                let lt = reference.cholesky(k).l().transpose();
                let d = lt.nrows();
                let inv = lt
                    .solve_upper_triangular(&DMatrix::identity(d, d))
                    .expect("Cholesky factor is invertible");
                inv * 0.5
            })
            .collect();
        Ok(Self {
            alg,
            reference,
            samplers,
        })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn reference(&self) -> &GaussianVector {
        &self.reference
    }

    /// `b^r`.
    pub fn effective_shift(&self, b: &Element<f64>, r: f64) -> Result<Element<f64>> {
        self.alg.dilate(&r, b)
    }

    /// `ln ∫ F_μ(a·s) F_ν(a) da` in the reference normalization, by
    /// integrating the top level first. Class `<= 2` only.
    pub fn log_pair(&self, mu: &GaussianVector, nu: &GaussianVector, s: &Element<f64>) -> Result<f64> {
        let class = self.alg.class();
        if class > 2 {
            return Err(Error::ClassTooLarge(class));
        }
        let poly = ShiftPolynomials::probe(&self.alg, s)?;
        debug_assert!(poly.is_affine());
        let r1 = self.alg.level_range(1);
        let d1 = r1.len();
        let s1 = DVector::from_column_slice(&s.coords()[r1.clone()]);
        let (mu1, nu1) = (mu.form(1), nu.form(1));

        let mut log_value = 0.5 * self.alg.dim() as f64 * 2f64.ln();
        for k in 1..=class {
            log_value += 0.5 * log_det(self.reference.cholesky(k));
        }

        let mut a = mu1 + nu1;
        let mut beta = mu1 * &s1;
        let mut gamma = s1.dot(&(mu1 * &s1));

        if class == 2 {
            let r2 = self.alg.level_range(2);
            let d2 = r2.len();
            let s2 = DVector::from_column_slice(&s.coords()[r2.clone()]);
            let m = DMatrix::from_fn(d2, d1, |j, i| poly.linear_coefficient(r2.start + j, r1.start + i));
            let (mu2, nu2) = (mu.form(2), nu.form(2));
            let sum = Cholesky::new(mu2 + nu2).ok_or(Error::NotPositiveDefinite { level: 2 })?;
            log_value -= 0.5 * log_det(&sum);
            let h = mu2 - mu2 * sum.solve(mu2);
            let h = (&h + h.transpose()) * 0.5;
            let mth = m.transpose() * &h;
            a += &mth * &m;
            beta += &mth * &s2;
            gamma += s2.dot(&(&h * &s2));
        }

        let ca = Cholesky::new(a).ok_or(Error::NotPositiveDefinite { level: 1 })?;
        log_value -= 0.5 * log_det(&ca);
        log_value += beta.dot(&ca.solve(&beta)) - gamma;
        Ok(log_value)
    }

    /// `ln ||F_μ||^2` in the reference normalization.
    pub fn log_norm_sq(&self, mu: &GaussianVector) -> Result<f64> {
        self.log_pair(mu, mu, &self.alg.zero())
    }

    pub fn overlap_exact(&self, b: &Element<f64>, r: f64) -> Result<Overlap> {
        let s = self.effective_shift(b, r)?;
        let ln = self.log_pair(&self.reference, &self.reference, &s)?;
        Ok(Overlap {
            value: ln.exp(),
            deficit: -ln.exp_m1(),
            stderr: 0.0,
            samples: 0,
            path: OverlapPath::Exact,
        })
    }

    /// Importance sampling from the density `∝ F^2`, averaging each draw
    /// over the `2^n` per-level sign flips (which preserve the density).
    pub fn overlap_mc(&self, b: &Element<f64>, r: f64, cfg: &McConfig) -> Result<Overlap> {
        if cfg.samples < 2 || cfg.batches == 0 {
            return Err(Error::Config("Monte Carlo needs at least 2 samples and 1 batch".into()));
        }
        let s = self.effective_shift(b, r)?;
        let poly = ShiftPolynomials::probe(&self.alg, &s)?;
        let n = self.alg.dim();
        let class = self.alg.class();
        let ranges: Vec<_> = (1..=class).map(|k| self.alg.level_range(k)).collect();
        let per_batch = cfg.samples.div_ceil(cfg.batches);
        let sums: Vec<(f64, f64, usize)> = (0..cfg.batches)
            .into_par_iter()
            .map(|batch| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(batch as u64);
                let count = per_batch.min(cfg.samples.saturating_sub(batch * per_batch));
                let mut values = Vec::with_capacity(count);
                let mut a = vec![0.0; n];
                let mut flipped = vec![0.0; n];
                let mut moved = vec![0.0; n];
                for _ in 0..count {
                    for (k, range) in ranges.iter().enumerate() {
                        let z: Vec<f64> = (0..range.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
                        let w = &self.samplers[k];
                        for (row, i) in range.clone().enumerate() {
                            a[i] = (0..range.len()).map(|c| w[(row, c)] * z[c]).sum();
                        }
                    }
                    let base = self.reference.exponent(&self.alg, &a);
                    let mut acc = 0.0;
                    for mask in 0..(1usize << class) {
                        for (k, range) in ranges.iter().enumerate() {
                            let sign = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
                            for i in range.clone() {
                                flipped[i] = sign * a[i];
                            }
                        }
                        poly.apply_into(&flipped, &mut moved);
                        let delta = base - self.reference.exponent(&self.alg, &moved);
                        acc += -delta.exp_m1();
                    }
                    values.push(acc / (1usize << class) as f64);
                }
                let sum = pairwise_sum(&values);
                let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
                (sum, pairwise_sum(&sq), count)
            })
            .collect();
        let total: usize = sums.iter().map(|x| x.2).sum();
        let sum = pairwise_sum(&sums.iter().map(|x| x.0).collect::<Vec<_>>());
        let sq = pairwise_sum(&sums.iter().map(|x| x.1).collect::<Vec<_>>());
        let nf = total as f64;
        let mean = sum / nf;
        let var = ((sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        let stderr = (var / nf).sqrt();
        if let Some(target) = cfg.target_stderr {
            if stderr > target {
                return Err(Error::McBudget { stderr, target });
            }
        }
        Ok(Overlap {
            value: 1.0 - mean,
            deficit: mean,
            stderr,
            samples: total,
            path: OverlapPath::MonteCarlo,
        })
    }

    /// Exact path for class `<= 2`, Monte Carlo otherwise.
    pub fn overlap(&self, b: &Element<f64>, r: f64, cfg: &McConfig) -> Result<Overlap> {
        if self.alg.class() <= 2 {
            self.overlap_exact(b, r)
        } else {
            self.overlap_mc(b, r, cfg)
        }
    }

    /// `(log r, log(1 - overlap), relative stderr)` on the exponent window.
    pub fn small_r_deficits(&self, b: &Element<f64>, cfg: &McConfig) -> Result<Vec<(f64, f64, f64)>> {
        let (lo, hi) = EXPONENT_WINDOW;
        (0..EXPONENT_POINTS)
            .map(|i| {
                let t = lo + (hi - lo) * i as f64 / (EXPONENT_POINTS - 1) as f64;
                let cfg_i = McConfig {
                    seed: cfg.seed.wrapping_add(i as u64),
                    target_stderr: None,
                    ..*cfg
                };
                let o = self.overlap(b, t.exp(), &cfg_i)?;
                if !(o.deficit > 1e-15 && o.deficit > 3.0 * o.stderr) {
                    return Err(Error::NumericallyInvariant(1e-15));
                }
                Ok((t, o.deficit.ln(), o.stderr / o.deficit))
            })
            .collect()
    }

    /// Slope of `log(1 - overlap)` against `log r` for `r` in
    /// `[e^-5, e^-2]`.
    pub fn small_r_exponent(&self, b: &Element<f64>, cfg: &McConfig) -> Result<LineFit> {
        let pts = self.small_r_deficits(b, cfg)?;
        let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().map(|p| (p.0, p.1)).unzip();
        Ok(fit_line(&x, &y))
    }

    /// Exponent from the Monte Carlo deficits with the relative `r^2`
    /// correction `1 - overlap = c r^α (1 + κ r^2 + …)` fitted alongside,
    /// weighted by the sampling errors.
    pub fn small_r_exponent_corrected(&self, b: &Element<f64>, cfg: &McConfig) -> Result<LineFit> {
        let pts = self.small_r_deficits(b, cfg)?;
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let sigma: Vec<f64> = pts.iter().map(|p| p.2.max(1e-15)).collect();
        Ok(fit_line_with_power(&x, &y, &sigma, 2.0))
    }

    /// Grid quadrature of `(1 - ⟨T_r(b)F, F⟩)^{1/2} e^{-u(r)/2} d*r` plus
    /// the small-r continuation from the fitted exponent.
    pub fn summability_certificate(
        &self,
        b: &Element<f64>,
        meas: &RadialMeasure,
        cfg: &McConfig,
    ) -> Result<Certificate> {
        let mut integrand = Vec::with_capacity(meas.grid.len());
        for (i, &r) in meas.grid.nodes().iter().enumerate() {
            let cfg_i = McConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                target_stderr: None,
                ..*cfg
            };
            let o = self.overlap(b, r, &cfg_i)?;
            integrand.push(o.deficit.max(0.0).sqrt() * meas.half_density(r));
        }
        let integral = meas.grid.integrate(&integrand);
        let tail = TailEstimate::fit(&meas.grid, &integrand);
        if !tail.converges {
            return Err(Error::DivergentTail(format!(
                "overlap deficit behaves like r^{:.3} near r = 0",
                2.0 * tail.alpha
            )));
        }
        Ok(Certificate {
            integral,
            tail,
            total: integral + tail.value,
        })
    }
}
