use serde::Serialize;

use super::space::{BaseSpace, Configuration};
use crate::canonical::{scaled_inv, scaled_mul, RepFamily, Scaled};
use crate::error::{Error, Result};

/// Cut points closer than this are identified when refining partitions.
pub const CUT_TOL: f64 = 1e-14;

/// A step function `X = [0, 1] -> V`: value `values[i]` on
/// `[cuts[i], cuts[i + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentElement<V> {
    cuts: Vec<f64>,
    values: Vec<V>,
}

impl<V: Clone> CurrentElement<V> {
    pub fn new(cuts: Vec<f64>, values: Vec<V>) -> Result<Self> {
        let ok = cuts.len() >= 2
            && cuts.len() == values.len() + 1
            && cuts[0] == 0.0
            && *cuts.last().unwrap() == 1.0
            && cuts.windows(2).all(|w| w[1] > w[0]);
        if !ok {
            return Err(Error::Config(format!(
                "cells must partition [0, 1] increasingly with one value per cell (cuts {cuts:?}, {} values)",
                values.len()
            )));
        }
        Ok(Self { cuts, values })
    }

    pub fn constant(v: V) -> Self {
        Self {
            cuts: vec![0.0, 1.0],
            values: vec![v],
        }
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    pub fn cell_of(&self, x: f64) -> usize {
        (self.cuts.partition_point(|&c| c <= x) - 1).min(self.values.len() - 1)
    }

    pub fn at(&self, x: f64) -> &V {
        &self.values[self.cell_of(x)]
    }

    /// Cells with their measure.
    pub fn cells(&self) -> impl Iterator<Item = (f64, &V)> {
        self.cuts.windows(2).map(|w| w[1] - w[0]).zip(&self.values)
    }

    /// `∫_X φ(g(x)) dm(x)`, a finite sum over cells.
    pub fn integral<T>(&self, phi: impl Fn(&V) -> T) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        self.cells().map(|(w, v)| phi(v) * w).sum()
    }

    pub fn map<W: Clone>(&self, f: impl Fn(&V) -> W) -> CurrentElement<W> {
        CurrentElement {
            cuts: self.cuts.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Pointwise `f(g(x), h(x))` on the common refinement.
    pub fn zip_with<W: Clone, Z: Clone>(
        &self,
        other: &CurrentElement<W>,
        f: impl Fn(&V, &W) -> Z,
    ) -> CurrentElement<Z> {
        self.try_zip_with(other, |a, b| Ok::<_, Error>(f(a, b)))
            .expect("infallible")
    }

    /// Fallible [`CurrentElement::zip_with`].
    pub fn try_zip_with<W: Clone, Z: Clone, E>(
        &self,
        other: &CurrentElement<W>,
        f: impl Fn(&V, &W) -> std::result::Result<Z, E>,
    ) -> std::result::Result<CurrentElement<Z>, E> {
        let mut cuts: Vec<f64> = self.cuts.iter().chain(&other.cuts).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= CUT_TOL);
        *cuts.last_mut().unwrap() = 1.0;
        let values = cuts
            .windows(2)
            .map(|w| {
                let x = 0.5 * (w[0] + w[1]);
                f(self.at(x), other.at(x))
            })
            .collect::<std::result::Result<_, E>>()?;
        Ok(CurrentElement { cuts, values })
    }
}

impl CurrentElement<f64> {
    /// A scale current `r(x) > 0`.
    pub fn scales(cuts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveScale(*v));
        }
        Self::new(cuts, values)
    }

    /// `∫_X log r(x) dm(x)`.
    pub fn log_integral(&self) -> f64 {
        self.integral(|r| r.ln())
    }

    /// `∫_X |log r(x)| dm(x)`, finite for step functions.
    pub fn abs_log_integral(&self) -> f64 {
        self.integral(|r| r.ln().abs())
    }
}

/// Pointwise group operations for currents valued in `R*_+ ⋉ G`.
pub fn current_mul<F: RepFamily>(
    fam: &F,
    a: &CurrentElement<Scaled<F::Group>>,
    b: &CurrentElement<Scaled<F::Group>>,
) -> CurrentElement<Scaled<F::Group>> {
    a.zip_with(b, |p, q| scaled_mul(fam, p, q))
}

pub fn current_inv<F: RepFamily>(
    fam: &F,
    a: &CurrentElement<Scaled<F::Group>>,
) -> CurrentElement<Scaled<F::Group>> {
    a.map(|p| scaled_inv(fam, p))
}

pub fn scale_part<G: Clone>(a: &CurrentElement<Scaled<G>>) -> CurrentElement<f64> {
    a.map(|p| p.scale)
}

/// Result of moving a configuration by a scale current.
#[derive(Debug, Clone, Serialize)]
pub struct Transported {
    pub config: Configuration,
    /// Indices of points whose image leaves the window.
    pub left_window: Vec<usize>,
}

/// `(r, x) -> (r(x) r, x)` on every point.
pub fn act_on_configuration(
    scale: &CurrentElement<f64>,
    omega: &Configuration,
    space: &BaseSpace,
) -> Transported {
    let mut left_window = Vec::new();
    let points = omega
        .points
        .iter()
        .enumerate()
        .map(|(i, &(r, x))| {
            let moved = scale.at(x) * r;
            if !space.contains(moved) {
                left_window.push(i);
            }
            (moved, x)
        })
        .collect();
    Transported {
        config: Configuration::new(points),
        left_window,
    }
}
