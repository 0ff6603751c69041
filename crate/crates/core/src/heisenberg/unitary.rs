//! `U(n, 1)` as `(n+1) x (n+1)` matrices preserving `J0 = diag(1, …, 1, -1)`.
//!
//! Domain points are handled in the Siegel frame, where the form is
//! `J(w, w) = 2 Re(conj(w_0) w_n) + |w_1..w_{n-1}|^2` and `(a, b)` has
//! homogeneous coordinates `w = (a, b, 1)`; then `J(w, w) = a + conj(a) + |b|^2`
//! and the domain is the set of negative lines. The two frames are related by
//! `w_0 = (x_1 - x_{n+1}) / √2`, `w_mid = x_mid`, `w_n = (x_1 + x_{n+1}) / √2`,
//! which sends `v0 = (-1, 0)` to the line of `e_{n+1}`; its stabilizer is the
//! block subgroup `U(n) x U(1)`.
//!
//! `P` embeds through `matrix(r0, g) = B(g) S(r0)` (Siegel frame) with
//! `B(ζ, z) = [[1, zᵀ, ζ], [0, I, -conj z], [0, 0, 1]]` and
//! `S(s) = diag(s, I, 1/s)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::coherent::{CoherentCombination, DomainPoint};
use super::group::HeisElement;
use crate::canonical::Scaled;
use crate::error::{Error, Result};

/// Tolerance on `‖g* J0 g - J0‖`, relative to `max(1, ‖g‖^2)`.
pub const J_TOL: f64 = 1e-10;

type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnMatrix {
    mat: CMat,
}

fn j0(n: usize) -> CMat {
    CMat::from_fn(n + 1, n + 1, |i, j| {
        if i != j {
            c(0.0)
        } else if i == n {
            c(-1.0)
        } else {
            c(1.0)
        }
    })
}

/// Siegel coordinates `w = C x`.
fn cayley(n: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMat::identity(n + 1, n + 1);
    m[(0, 0)] = c(s);
    m[(0, n)] = c(-s);
    m[(n, 0)] = c(s);
    m[(n, n)] = c(s);
    m
}

fn cayley_inv(n: usize) -> CMat {
    // C is real orthogonal.
    cayley(n).transpose()
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl UnMatrix {
    /// Checks `g* J0 g = J0`.
    pub fn new(mat: CMat) -> Result<Self> {
        if !mat.is_square() || mat.nrows() < 3 {
            return Err(Error::Shape(format!(
                "U(n,1) needs a square matrix of size >= 3, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let g = Self { mat };
        let d = g.j_defect();
        let scale = max_abs(&g.mat).powi(2).max(1.0);
        if d > J_TOL * scale {
            return Err(Error::Constraint(format!("‖g* J g - J‖ = {d:e}")));
        }
        Ok(g)
    }

    /// `U(n, 1)` with `n >= 2`.
    pub fn identity(n: usize) -> Self {
        Self {
            mat: CMat::identity(n + 1, n + 1),
        }
    }

    pub fn n(&self) -> usize {
        self.mat.nrows() - 1
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn j_defect(&self) -> f64 {
        let j = j0(self.n());
        max_abs(&(self.mat.adjoint() * &j * &self.mat - j))
    }

    pub fn from_siegel(m: CMat) -> Result<Self> {
        let n = m.nrows() - 1;
        Self::new(cayley_inv(n) * m * cayley(n))
    }

    pub fn siegel(&self) -> CMat {
        let n = self.n();
        cayley(n) * &self.mat * cayley_inv(n)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat * &other.mat,
        }
    }

    /// `J0 g* J0`.
    pub fn inv(&self) -> Self {
        let j = j0(self.n());
        Self {
            mat: &j * self.mat.adjoint() * &j,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.mat - &other.mat))
    }

    /// Whether `g` lies in the block subgroup `U(n) x U(1)` that fixes `v0`.
    pub fn stabilizer_defect(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| self.mat[(i, n)].norm().max(self.mat[(n, i)].norm()))
            .fold(0.0, f64::max)
    }

    /// `exp(J0 K)` for a random anti-Hermitian `K` with Gaussian entries of
    /// standard deviation `spread`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, spread: f64) -> Self {
        let k = anti_hermitian(rng, n, spread, false);
        Self {
            mat: (j0(n) * k).exp(),
        }
    }

    /// A random element of the stabilizer `U(n) x U(1)`.
    pub fn random_stabilizer<R: Rng + ?Sized>(rng: &mut R, n: usize, spread: f64) -> Self {
        Self {
            mat: anti_hermitian(rng, n, spread, true).exp(),
        }
    }
}

fn anti_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, spread: f64, block: bool) -> CMat {
    let mut gauss = || spread * rng.sample::<f64, _>(StandardNormal);
    let mut k = CMat::zeros(n + 1, n + 1);
    for i in 0..=n {
        k[(i, i)] = Complex64::new(0.0, gauss());
        for j in 0..i {
            if block && i == n {
                continue;
            }
            let v = Complex64::new(gauss(), gauss());
            k[(i, j)] = v;
            k[(j, i)] = -v.conj();
        }
    }
    k
}

/// The image of `p = (r0, ζ0, z0) ∈ P` in `U(n, 1)`.
pub fn matrix_of(p: &Scaled<HeisElement>) -> UnMatrix {
    let m = p.body.dim();
    let n = m + 1;
    let mut b = CMat::identity(n + 1, n + 1);
    for (i, zi) in p.body.z.iter().enumerate() {
        b[(0, i + 1)] = *zi;
        b[(i + 1, n)] = -zi.conj();
    }
    b[(0, n)] = p.body.zeta;
    let mut s = CMat::identity(n + 1, n + 1);
    s[(0, 0)] = c(p.scale);
    s[(n, n)] = c(1.0 / p.scale);
    UnMatrix {
        mat: cayley_inv(n) * (b * s) * cayley(n),
    }
}

/// `g · v` on homogeneous coordinates `(a, b, 1)`.
pub fn mobius_action(g: &UnMatrix, v: &DomainPoint) -> Result<DomainPoint> {
    let n = g.n();
    if v.b.len() + 1 != n {
        return Err(Error::Shape(format!(
            "domain point of dimension {} for U({n},1)",
            v.b.len()
        )));
    }
    let mut w = nalgebra::DVector::from_element(n + 1, c(1.0));
    w[0] = v.a;
    for (i, bi) in v.b.iter().enumerate() {
        w[i + 1] = *bi;
    }
    let w = g.siegel() * w;
    let last = w[n];
    DomainPoint::new(w[0] / last, (1..n).map(|i| w[i] / last).collect())
}

/// The factorization `g = matrix(p) u` with `u` fixing `v0`.
pub fn pu_decompose(g: &UnMatrix) -> Result<(Scaled<HeisElement>, UnMatrix)> {
    let v = mobius_action(g, &DomainPoint::base(g.n() - 1))?;
    let r2 = 0.5 * v.gap();
    let z: Vec<Complex64> = v.b.iter().map(|bi| -bi.conj()).collect();
    let p = Scaled::new(r2.sqrt(), HeisElement::new(v.a + r2, z)?);
    let u = matrix_of(&p).inv().mul(g);
    Ok((p, u))
}

/// `T~(g)(sum κ_j f_{v_j}) = sum κ_j f_{g v_j}` for combinations with
/// weights summing to zero.
pub fn extended_apply(g: &UnMatrix, x: &CoherentCombination) -> Result<CoherentCombination> {
    if !x.is_difference() {
        return Err(Error::Constraint(
            "extended_apply needs a difference of coherent vectors (weights summing to 0)".into(),
        ));
    }
    Ok(CoherentCombination {
        terms: x
            .terms
            .iter()
            .map(|(k, v)| Ok((*k, mobius_action(g, v)?)))
            .collect::<Result<_>>()?,
    })
}
