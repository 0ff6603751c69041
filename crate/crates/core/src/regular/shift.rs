use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie_core::Element;
use crate::Algebra;

/// Probe points used to confirm the fitted polynomial.
const VERIFY_POINTS: usize = 8;

/// The right translation `a -> a·s` written as `a + s + p(a)` with `p` a
/// polynomial of degree at most two in `a`, recovered by probing the group
/// law. Exact for class `<= 3`.
#[derive(Debug, Clone)]
pub struct ShiftPolynomials {
    shift: Vec<f64>,
    /// `(k, i, c)`: `p_k += c a_i`.
    linear: Vec<(usize, usize, f64)>,
    /// `(k, i, j, c)` with `i <= j`: `p_k += c a_i a_j`.
    quadratic: Vec<(usize, usize, usize, f64)>,
}

impl ShiftPolynomials {
    pub fn probe(alg: &Algebra, s: &Element<f64>) -> Result<Self> {
        let n = alg.dim();
        let p = |a: &Element<f64>| alg.bch_correction(a, s);
        let mut lin = vec![vec![0.0; n]; n];
        let mut diag = vec![vec![0.0; n]; n];
        let mut plus = Vec::with_capacity(n);
        for i in 0..n {
            let e = alg.basis(i);
            let pp = p(&e)?;
            let pm = p(&e.neg())?;
            for k in 0..n {
                lin[k][i] = 0.5 * (pp.coords()[k] - pm.coords()[k]);
                diag[k][i] = 0.5 * (pp.coords()[k] + pm.coords()[k]);
            }
            plus.push(pp);
        }
        // Probing round-off is O(eps |s|^2); coefficients below this are zero.
        let floor = 1e-13 * s.max_abs().max(1.0).powi(2);
        let mut linear = Vec::new();
        let mut quadratic = Vec::new();
        for k in 0..n {
            for i in 0..n {
                if lin[k][i].abs() > floor {
                    linear.push((k, i, lin[k][i]));
                }
                if diag[k][i].abs() > floor {
                    quadratic.push((k, i, i, diag[k][i]));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let pij = p(&alg.basis(i).add(&alg.basis(j)))?;
                for k in 0..n {
                    // p(e_i + e_j) = L e_i + L e_j + Q_ii + Q_jj + Q_ij
                    let c = pij.coords()[k] - plus[i].coords()[k] - plus[j].coords()[k];
                    if c.abs() > floor {
                        quadratic.push((k, i, j, c));
                    }
                }
            }
        }
        let poly = Self {
            shift: s.coords().to_vec(),
            linear,
            quadratic,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let scale = s.max_abs().max(1.0);
        for _ in 0..VERIFY_POINTS {
            let a = alg.sample_element(&mut rng, 1.0);
            let exact = alg.group_mul(&a, s)?;
            let got = poly.apply(a.coords());
            let err = exact.sub(&Element::new(got)).max_abs();
            if err > 1e-9 * scale * scale {
                return Err(Error::ClassTooLarge(alg.class()));
            }
        }
        Ok(poly)
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// `a·s`.
    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = a.iter().zip(&self.shift).map(|(x, y)| x + y).collect();
        self.add_correction(a, &mut out);
        out
    }

    /// Writes `a·s` into `out`.
    pub fn apply_into(&self, a: &[f64], out: &mut [f64]) {
        for ((o, x), y) in out.iter_mut().zip(a).zip(&self.shift) {
            *o = x + y;
        }
        self.add_correction(a, out);
    }

    fn add_correction(&self, a: &[f64], out: &mut [f64]) {
        for &(k, i, c) in &self.linear {
            out[k] += c * a[i];
        }
        for &(k, i, j, c) in &self.quadratic {
            out[k] += c * a[i] * a[j];
        }
    }

    /// Coefficient of `a_i` in `p_k`.
    pub fn linear_coefficient(&self, k: usize, i: usize) -> f64 {
        self.linear
            .iter()
            .filter(|(kk, ii, _)| *kk == k && *ii == i)
            .map(|e| e.2)
            .sum()
    }

    pub fn is_affine(&self) -> bool {
        self.quadratic.is_empty()
    }

    /// `true` when every `p_k` involves only coordinates of levels below
    /// the level of `k`.
    pub fn is_triangular(&self, alg: &Algebra) -> bool {
        self.linear.iter().all(|&(k, i, _)| alg.level(i) < alg.level(k))
            && self
                .quadratic
                .iter()
                .all(|&(k, i, j, _)| alg.level(i) < alg.level(k) && alg.level(j) < alg.level(k))
    }
}
