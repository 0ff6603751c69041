use std::fmt;
use std::ops::Range;

use serde::Serialize;

use super::bch;
use super::tensor::StructureTensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A graded nilpotent Lie algebra `L = R_1 + ... + R_n` with
/// `[R_i, R_j] ⊂ R_{i+j}`, stored through its structure constants in a basis
/// adapted to the grading (level 1 first).
#[derive(Debug, Clone)]
pub struct GradedAlgebra<T> {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    level_of: Vec<usize>,
    tensor: StructureTensor<T>,
    bch: Vec<(Vec<u8>, T)>,
}

/// A violated algebra invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    Antisymmetry { i: usize, j: usize, defect: f64 },
    Grading { i: usize, j: usize, k: usize, defect: f64 },
    Jacobi { i: usize, j: usize, k: usize, defect: f64 },
    ClassNotSharp { class: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Antisymmetry { i, j, defect } => {
                write!(f, "antisymmetry violated on basis pair ({i}, {j}): defect {defect:e}")
            }
            Diagnostic::Grading { i, j, k, defect } => write!(
                f,
                "grading violated: [e_{i}, e_{j}] has component {defect:e} on e_{k} outside R_(i+j)"
            ),
            Diagnostic::Jacobi { i, j, k, defect } => {
                write!(f, "Jacobi identity violated on basis triple ({i}, {j}, {k}): defect {defect:e}")
            }
            Diagnostic::ClassNotSharp { class } => {
                write!(f, "class {class} is not sharp: all {class}-fold brackets of R_1 vanish")
            }
        }
    }
}

impl<T: Scalar> GradedAlgebra<T> {
    pub fn new(dims: Vec<usize>, tensor: StructureTensor<T>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Shape(format!(
                "level dimensions must be positive, got {dims:?}"
            )));
        }
        if dims.len() > bch::MAX_DEPTH {
            return Err(Error::ClassTooLarge(dims.len()));
        }
        let total: usize = dims.iter().sum();
        if tensor.dim() != total {
            return Err(Error::Shape(format!(
                "structure tensor has dimension {}, levels sum to {total}",
                tensor.dim()
            )));
        }
        let mut offsets = vec![0];
        let mut level_of = Vec::with_capacity(total);
        for (k, d) in dims.iter().enumerate() {
            offsets.push(offsets[k] + d);
            level_of.extend(std::iter::repeat_n(k + 1, *d));
        }
        let bch = bch::terms_up_to(dims.len())
            .map(|(w, c)| (w.clone(), T::from_ratio(*c.numer(), *c.denom())))
            .collect();
        Ok(Self {
            dims,
            offsets,
            level_of,
            tensor,
            bch,
        })
    }

    /// Builds from a sparse list `(i, j, [e_i, e_j])` over global basis
    /// indices. Unlisted pairs bracket to zero; nothing is filled in by
    /// antisymmetry.
    pub fn from_entries<I>(dims: Vec<usize>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Vec<T>)>,
    {
        let total: usize = dims.iter().sum();
        let mut tensor = StructureTensor::zeros(total);
        for (i, j, v) in entries {
            if i >= total || j >= total {
                return Err(Error::Shape(format!(
                    "bracket index ({i}, {j}) out of range for dimension {total}"
                )));
            }
            if v.len() != total {
                return Err(Error::Shape(format!(
                    "bracket ({i}, {j}) has a target vector of length {}, expected {total}",
                    v.len()
                )));
            }
            for (k, c) in v.into_iter().enumerate() {
                tensor.set(i, j, k, c);
            }
        }
        Self::new(dims, tensor)
    }

    pub fn class(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Level (1-based) of a basis index.
    pub fn level(&self, basis: usize) -> usize {
        self.level_of[basis]
    }

    /// Basis indices spanning `R_k` (1-based `k`).
    pub fn level_range(&self, k: usize) -> Range<usize> {
        self.offsets[k - 1]..self.offsets[k]
    }

    pub fn structure(&self) -> &StructureTensor<T> {
        &self.tensor
    }

    pub(crate) fn bch_terms(&self) -> &[(Vec<u8>, T)] {
        &self.bch
    }

    /// Checks antisymmetry, grading closure, Jacobi and class sharpness.
    /// An empty result means the algebra is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let tol = T::identity_tolerance();
        let n = self.dim();
        let mut out = Vec::new();

        for i in 0..n {
            for j in i..n {
                let defect = self.tensor.antisymmetry_defect(i, j);
                if defect > tol {
                    out.push(Diagnostic::Antisymmetry { i, j, defect });
                }
            }
        }

        for i in 0..n {
            for j in 0..n {
                let target = self.level(i) + self.level(j);
                for k in 0..n {
                    if self.level(k) == target {
                        continue;
                    }
                    let defect = self.tensor.get(i, j, k).magnitude();
                    if defect > tol {
                        out.push(Diagnostic::Grading { i, j, k, defect });
                    }
                }
            }
        }

        for ((i, j, k), defect) in self.tensor.jacobi_violations(tol) {
            out.push(Diagnostic::Jacobi { i, j, k, defect });
        }

        if !self.is_class_sharp(tol) {
            out.push(Diagnostic::ClassNotSharp { class: self.class() });
        }
        out
    }

    /// `L_n != 0`: some right-normed `n`-fold bracket of `R_1` basis vectors
    /// is nonzero.
    fn is_class_sharp(&self, tol: f64) -> bool {
        let n = self.class();
        let r1 = self.level_range(1);
        let d1 = r1.len();
        let total = self.dim();
        let unit = |i: usize| {
            let mut v = vec![T::zero(); total];
            v[i] = T::one();
            v
        };
        let words = d1.pow(n as u32);
        for mut code in 0..words {
            let mut letters = Vec::with_capacity(n);
            for _ in 0..n {
                letters.push(code % d1);
                code /= d1;
            }
            let mut acc = unit(letters[n - 1]);
            for &l in letters[..n - 1].iter().rev() {
                acc = self.tensor.bracket(&unit(l), &acc);
            }
            if acc.iter().any(|c| c.magnitude() > tol) {
                return true;
            }
        }
        false
    }

    /// Abelian algebra of dimension `d` (class 1).
    pub fn abelian(d: usize) -> Result<Self> {
        Self::new(vec![d], StructureTensor::zeros(d))
    }

    /// Heisenberg algebra of dimension `2n - 1`: `R_1` spanned by
    /// `X_1..X_{n-1}, Y_1..Y_{n-1}`, `R_2` by `T`, with `[X_i, Y_i] = T`.
    pub fn heisenberg(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Shape(format!("Heisenberg order needs n >= 2, got {n}")));
        }
        let m = n - 1;
        let total = 2 * m + 1;
        let t = 2 * m;
        let mut entries = Vec::new();
        for i in 0..m {
            let mut v = vec![T::zero(); total];
            v[t] = T::one();
            entries.push((i, m + i, v.clone()));
            v[t] = -T::one();
            entries.push((m + i, i, v));
        }
        Self::from_entries(vec![2 * m, 1], entries)
    }

    /// Free nilpotent algebra on two generators `X, Y` of class 1, 2 or 3.
    ///
    /// Class 3 basis: `X, Y | [X,Y] | [X,[X,Y]], [Y,[X,Y]]`.
    pub fn free_nilpotent(class: usize) -> Result<Self> {
        match class {
            1 => Self::abelian(2),
            2 => Self::heisenberg(2),
            3 => {
                let total = 5;
                let e = |k: usize, s: i64| {
                    let mut v = vec![T::zero(); total];
                    v[k] = T::from_ratio(s, 1);
                    v
                };
                let entries = vec![
                    (0, 1, e(2, 1)),
                    (1, 0, e(2, -1)),
                    (0, 2, e(3, 1)),
                    (2, 0, e(3, -1)),
                    (1, 2, e(4, 1)),
                    (2, 1, e(4, -1)),
                ];
                Self::from_entries(vec![2, 1, 2], entries)
            }
            c => Err(Error::Config(format!(
                "free nilpotent generator supports class 1..=3, got {c}"
            ))),
        }
    }
}
