use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lie_core::Element;

/// Tolerance on `Re ζ + |z|^2 / 2 = 0`, relative to `max(1, |z|^2)`.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Element `(ζ, z)` of the Heisenberg group of order `2n - 1`, with
/// `ζ = i t - |z|^2 / 2` and `z ∈ C^{n-1}`.
///
/// Law `(ζ1, z1)(ζ2, z2) = (ζ1 + ζ2 - z1·conj(z2), z1 + z2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisElement {
    pub zeta: Complex64,
    pub z: Vec<Complex64>,
}

/// `sum_i x_i y_i` (no conjugation).
pub fn bilinear(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `sum_i x_i conj(y_i)`.
pub fn hermitian(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

impl HeisElement {
    /// Checks the constraint on `Re ζ`.
    pub fn new(zeta: Complex64, z: Vec<Complex64>) -> Result<Self> {
        let g = Self { zeta, z };
        let d = g.constraint_defect();
        if d > CONSTRAINT_TOL * norm_sq(&g.z).max(1.0) {
            return Err(Error::Constraint(format!(
                "Re ζ + |z|^2/2 = {d:e} for ζ = {zeta}"
            )));
        }
        Ok(g)
    }

    /// `(i t - |z|^2 / 2, z)`.
    pub fn from_tz(t: f64, z: Vec<Complex64>) -> Self {
        let zeta = Complex64::new(-0.5 * norm_sq(&z), t);
        Self { zeta, z }
    }

    pub fn identity(m: usize) -> Self {
        Self {
            zeta: Complex64::new(0.0, 0.0),
            z: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    /// Length of `z` (`n - 1`).
    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn t(&self) -> f64 {
        self.zeta.im
    }

    pub fn constraint_defect(&self) -> f64 {
        (self.zeta.re + 0.5 * norm_sq(&self.z)).abs()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            zeta: self.zeta + other.zeta - hermitian(&self.z, &other.z),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
        }
    }

    /// `(-i t - |z|^2 / 2, -z)`, i.e. `(conj ζ, -z)`.
    pub fn inv(&self) -> Self {
        Self {
            zeta: self.zeta.conj(),
            z: self.z.iter().map(|c| -c).collect(),
        }
    }

    /// `(r^2 ζ, r z)`.
    pub fn dilate(&self, r: f64) -> Self {
        Self {
            zeta: self.zeta * (r * r),
            z: self.z.iter().map(|c| c * r).collect(),
        }
    }

    /// Coordinates of the graded Heisenberg algebra with basis
    /// `X_1..X_m, Y_1..Y_m, T` and `[X_i, Y_i] = T`: `z = x + i y`,
    /// `t = 2 T`.
    pub fn to_canonical(&self) -> Element<f64> {
        let mut c: Vec<f64> = self.z.iter().map(|v| v.re).collect();
        c.extend(self.z.iter().map(|v| v.im));
        c.push(0.5 * self.t());
        Element::new(c)
    }

    pub fn from_canonical(a: &Element<f64>) -> Result<Self> {
        let c = a.coords();
        if c.len().is_multiple_of(2) {
            return Err(Error::Shape(format!(
                "Heisenberg coordinates need odd length, got {}",
                c.len()
            )));
        }
        let m = c.len() / 2;
        let z = (0..m).map(|i| Complex64::new(c[i], c[m + i])).collect();
        Ok(Self::from_tz(2.0 * c[2 * m], z))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| (a - b).norm())
            .fold((self.zeta - other.zeta).norm(), f64::max)
    }
}
