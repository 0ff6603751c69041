use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::Algebra;

/// `F_μ(a) = exp(-sum_k a_k^T μ_k a_k)` with one SPD form per level.
#[derive(Debug, Clone)]
pub struct GaussianVector {
    forms: Vec<DMatrix<f64>>,
    chol: Vec<Cholesky<f64, Dyn>>,
    /// `ln ∫_{R_k} e^{-2 μ_k(a_k)} da_k` (Lebesgue), per level.
    log_norms: Vec<f64>,
}

/// `ln det` from a Cholesky factor.
pub(crate) fn log_det(c: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * c.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>()
}

impl GaussianVector {
    pub fn new(alg: &Algebra, forms: Vec<DMatrix<f64>>) -> Result<Self> {
        if forms.len() != alg.class() {
            return Err(Error::Shape(format!(
                "{} forms for an algebra of class {}",
                forms.len(),
                alg.class()
            )));
        }
        let mut chol = Vec::with_capacity(forms.len());
        let mut log_norms = Vec::with_capacity(forms.len());
        for (k, m) in forms.iter().enumerate() {
            let d = alg.dims()[k];
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Shape(format!(
                    "form on level {} is {}x{}, expected {d}x{d}",
                    k + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
            let asym = (m - m.transpose()).amax();
            if asym > 1e-12 * m.amax().max(1.0) {
                return Err(Error::NotPositiveDefinite { level: k + 1 });
            }
            let c = Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite { level: k + 1 })?;
            if c.l_dirty().diagonal().iter().any(|x| !(*x > 0.0)) {
                return Err(Error::NotPositiveDefinite { level: k + 1 });
            }
            // ∫ e^{-x^T (2μ) x} dx = π^{d/2} det(2μ)^{-1/2}
            let ln = 0.5 * d as f64 * (std::f64::consts::PI / 2.0).ln() - 0.5 * log_det(&c);
            log_norms.push(ln);
            chol.push(c);
        }
        Ok(Self {
            forms,
            chol,
            log_norms,
        })
    }

    /// Diagonal forms given level by level.
    pub fn diagonal(alg: &Algebra, diag: &[Vec<f64>]) -> Result<Self> {
        let forms = diag
            .iter()
            .map(|d| DMatrix::from_diagonal(&DVector::from_column_slice(d)))
            .collect();
        Self::new(alg, forms)
    }

    /// `μ_k = c I` on every level.
    pub fn isotropic(alg: &Algebra, c: f64) -> Result<Self> {
        let diag: Vec<Vec<f64>> = alg.dims().iter().map(|&d| vec![c; d]).collect();
        Self::diagonal(alg, &diag)
    }

    pub fn forms(&self) -> &[DMatrix<f64>] {
        &self.forms
    }

    pub fn form(&self, level: usize) -> &DMatrix<f64> {
        &self.forms[level - 1]
    }

    pub(crate) fn cholesky(&self, level: usize) -> &Cholesky<f64, Dyn> {
        &self.chol[level - 1]
    }

    /// Stored `ln ∫ e^{-2μ_k} da_k` per level.
    pub fn log_norms(&self) -> &[f64] {
        &self.log_norms
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norms.iter().sum()
    }

    /// `μ(a) = sum_k a_k^T μ_k a_k` on flattened coordinates.
    pub fn exponent(&self, alg: &Algebra, a: &[f64]) -> f64 {
        let mut total = 0.0;
        for k in 1..=alg.class() {
            let x = &a[alg.level_range(k)];
            let m = &self.forms[k - 1];
            for (i, xi) in x.iter().enumerate() {
                let mut row = 0.0;
                for (j, xj) in x.iter().enumerate() {
                    row += m[(i, j)] * xj;
                }
                total += xi * row;
            }
        }
        total
    }
}
