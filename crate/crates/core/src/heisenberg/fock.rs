use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::group::HeisElement;
use crate::error::{Error, Result};
use crate::numeric::{binomial, factorial};

/// Extra degrees used to resolve the part of `T(g) f` that a truncation
/// discards.
pub const LEAKAGE_MARGIN: usize = 40;

/// Analytic polynomials in `z ∈ C^m` of total degree at most `D`, with
/// `⟨z^α, z^β⟩ = δ_{αβ} α!` (Gaussian measure `e^{-|z|^2} d^2z / π^m`).
#[derive(Debug, Clone)]
pub struct FockTruncation {
    m: usize,
    degree: usize,
    monomials: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    gram: Vec<f64>,
}

/// Coefficients over the monomial basis of a [`FockTruncation`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub coeffs: Vec<Complex64>,
}

fn multi_indices(m: usize, total: usize) -> Vec<Vec<u32>> {
    if m == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in multi_indices(m - 1, total - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

impl FockTruncation {
    pub fn new(m: usize, degree: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("Fock space needs n >= 2 (z-dimension >= 1)".into()));
        }
        let monomials: Vec<Vec<u32>> = (0..=degree).flat_map(|d| multi_indices(m, d)).collect();
        let index = monomials.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let gram = monomials
            .iter()
            .map(|a| a.iter().map(|&k| factorial(k as usize)).product())
            .collect();
        Ok(Self {
            m,
            degree,
            monomials,
            index,
            gram,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub fn total_degree(&self, i: usize) -> usize {
        self.monomials[i].iter().map(|&k| k as usize).sum()
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    pub fn zero(&self) -> FockVector {
        FockVector {
            coeffs: vec![Complex64::new(0.0, 0.0); self.dim()],
        }
    }

    /// The constant function 1.
    pub fn vacuum(&self) -> FockVector {
        let mut v = self.zero();
        v.coeffs[0] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn monomial(&self, alpha: &[u32]) -> Result<FockVector> {
        let i = self
            .index_of(alpha)
            .ok_or_else(|| Error::Shape(format!("monomial {alpha:?} outside the truncation")))?;
        let mut v = self.zero();
        v.coeffs[i] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// Truncated `e^{(z, b)} = sum_α b^α z^α / α!`.
    pub fn exponential(&self, b: &[Complex64]) -> FockVector {
        FockVector {
            coeffs: self
                .monomials
                .iter()
                .zip(&self.gram)
                .map(|(a, g)| {
                    a.iter()
                        .zip(b)
                        .map(|(&k, bi)| bi.powu(k))
                        .product::<Complex64>()
                        / *g
                })
                .collect(),
        }
    }

    pub fn inner(&self, f: &FockVector, g: &FockVector) -> Complex64 {
        f.coeffs
            .iter()
            .zip(&g.coeffs)
            .zip(&self.gram)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum()
    }

    pub fn norm(&self, f: &FockVector) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }

    /// Matrix of `P_D T(ζ0, z0) P_D`, `(T f)(z) = e^{ζ0 - (z, conj z0)} f(z + z0)`.
    pub fn operator(&self, g: &HeisElement) -> DMatrix<Complex64> {
        let d = self.dim();
        let scale = g.zeta.exp();
        let mut mat = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for (col, alpha) in self.monomials.iter().enumerate() {
            // Per-coordinate factors (z_i + z0_i)^{α_i} e^{-z_i conj(z0_i)}.
            let factors: Vec<Vec<Complex64>> = alpha
                .iter()
                .zip(&g.z)
                .map(|(&a, &z0)| {
                    let a = a as usize;
                    let w = -z0.conj();
                    (0..=self.degree)
                        .map(|j| {
                            let mut c = Complex64::new(0.0, 0.0);
                            for p in 0..=a.min(j) {
                                let k = j - p;
                                c += binomial(a, p) * z0.powu((a - p) as u32) * w.powu(k as u32)
                                    / factorial(k);
                            }
                            c
                        })
                        .collect()
                })
                .collect();
            for (row, beta) in self.monomials.iter().enumerate() {
                let v: Complex64 = beta
                    .iter()
                    .zip(&factors)
                    .map(|(&b, f)| f[b as usize])
                    .product();
                mat[(row, col)] = scale * v;
            }
        }
        mat
    }

    pub fn apply(&self, g: &HeisElement, f: &FockVector) -> FockVector {
        let t = self.operator(g);
        FockVector {
            coeffs: (&t * nalgebra::DVector::from_column_slice(&f.coeffs)).as_slice().to_vec(),
        }
    }

    /// Largest norm that `T(g)` pushes above degree `D` from a unit vector of
    /// degree `<= D/2`: the top singular value of the discarded block of the
    /// operator, resolved at degree `D + LEAKAGE_MARGIN + 4|z0|^2`.
    pub fn leakage(&self, g: &HeisElement) -> f64 {
        let z2: f64 = g.z.iter().map(|c| c.norm_sqr()).sum();
        let big = FockTruncation::new(self.m, self.degree + LEAKAGE_MARGIN + (4.0 * z2).ceil() as usize)
            .expect("m >= 1");
        let t = big.operator(g);
        let cols: Vec<usize> = (0..big.dim()).filter(|&i| 2 * big.total_degree(i) <= self.degree).collect();
        let rows: Vec<usize> = (0..big.dim()).filter(|&i| big.total_degree(i) > self.degree).collect();
        let block = DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            let (r, c) = (rows[i], cols[j]);
            t[(r, c)] * (big.gram[r] / big.gram[c]).sqrt()
        });
        block.singular_values().iter().cloned().fold(0.0, f64::max)
    }
}

/// The truncated representation `f -> P_D T(g) f` with its declared error
/// `ε(D)` on the degree `<= D/2` subspace.
#[derive(Debug, Clone)]
pub struct IrrepAction {
    pub vector: FockVector,
    pub epsilon: f64,
}

pub fn irrep_apply(trunc: &FockTruncation, g: &HeisElement, f: &FockVector) -> IrrepAction {
    IrrepAction {
        vector: trunc.apply(g, f),
        epsilon: trunc.leakage(g),
    }
}
