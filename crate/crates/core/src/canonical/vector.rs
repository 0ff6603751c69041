use num_complex::Complex64;
use rayon::prelude::*;

use super::family::RepFamily;
use super::grid::RadialGrid;

/// A section `r_i -> f(r_i) ∈ K` over a [`RadialGrid`], with
/// `||f||^2 = sum_i w ||f(r_i)||^2`.
///
/// Nodes vacated by a scale shift hold the zero vector and are flagged
/// invalid.
#[derive(Debug, Clone)]
pub struct DirectIntegralVector<V> {
    pub fibers: Vec<V>,
    pub valid: Vec<bool>,
}

impl<V: Clone + Send + Sync> DirectIntegralVector<V> {
    pub fn new(fibers: Vec<V>) -> Self {
        let valid = vec![true; fibers.len()];
        Self { fibers, valid }
    }

    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    /// Per-node `||f(r_i)||^2`.
    pub fn fiber_norms_sq<F: RepFamily<Vector = V>>(&self, fam: &F) -> Vec<f64> {
        self.fibers.par_iter().map(|v| fam.norm_sq(v)).collect()
    }

    pub fn norm_sq<F: RepFamily<Vector = V>>(&self, fam: &F, grid: &RadialGrid) -> f64 {
        grid.integrate(&self.fiber_norms_sq(fam))
    }

    /// `||f||^2` restricted to nodes valid in `self` and in every mask.
    pub fn norm_sq_on<F: RepFamily<Vector = V>>(
        &self,
        fam: &F,
        grid: &RadialGrid,
        masks: &[&[bool]],
    ) -> f64 {
        let vals: Vec<f64> = self
            .fibers
            .par_iter()
            .enumerate()
            .map(|(i, v)| {
                if self.valid[i] && masks.iter().all(|m| m[i]) {
                    fam.norm_sq(v)
                } else {
                    0.0
                }
            })
            .collect();
        grid.integrate(&vals)
    }

    /// `⟨f, g⟩ = sum_i w ⟨f(r_i), g(r_i)⟩`.
    pub fn inner<F: RepFamily<Vector = V>>(&self, other: &Self, fam: &F, grid: &RadialGrid) -> Complex64 {
        let parts: Vec<Complex64> = self
            .fibers
            .par_iter()
            .zip(&other.fibers)
            .map(|(a, b)| fam.inner(a, b))
            .collect();
        let re: Vec<f64> = parts.iter().map(|c| c.re).collect();
        let im: Vec<f64> = parts.iter().map(|c| c.im).collect();
        Complex64::new(grid.integrate(&re), grid.integrate(&im))
    }

    /// Nodewise `sum_j c_j f_j`; a node is valid when it is valid in every
    /// operand.
    pub fn combine<F: RepFamily<Vector = V>>(fam: &F, terms: &[(Complex64, &Self)]) -> Self {
        let n = terms.first().map_or(0, |t| t.1.len());
        let fibers = (0..n)
            .into_par_iter()
            .map(|i| {
                let node: Vec<(Complex64, &V)> = terms.iter().map(|(c, f)| (*c, &f.fibers[i])).collect();
                fam.combine(&node)
            })
            .collect();
        let valid = (0..n).map(|i| terms.iter().all(|(_, f)| f.valid[i])).collect();
        Self { fibers, valid }
    }

    /// `self - other`.
    pub fn sub<F: RepFamily<Vector = V>>(&self, other: &Self, fam: &F) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::combine(fam, &[(one, self), (-one, other)])
    }

    /// Largest per-node norm over valid nodes.
    pub fn max_fiber_norm<F: RepFamily<Vector = V>>(&self, fam: &F) -> f64 {
        let norms = self.fiber_norms_sq(fam);
        norms
            .iter()
            .zip(&self.valid)
            .filter(|(_, v)| **v)
            .map(|(n, _)| n.sqrt())
            .fold(0.0, f64::max)
    }
}
