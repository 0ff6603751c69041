use crate::scalar::Scalar;

/// Dense structure constants `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> StructureTensor<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.data[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: T) {
        let idx = self.idx(i, j, k);
        self.data[idx] = value;
    }

    /// `[e_i, e_j]` as a coordinate vector.
    pub fn basis_bracket(&self, i: usize, j: usize) -> &[T] {
        let start = self.idx(i, j, 0);
        &self.data[start..start + self.dim]
    }

    pub fn bracket(&self, a: &[T], b: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let w = ai.clone() * bj.clone();
                for (k, c) in self.basis_bracket(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].clone() + w.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim];
        v[i] = T::one();
        v
    }

    /// Largest component of `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]`.
    pub fn jacobi_defect(&self, i: usize, j: usize, k: usize) -> f64 {
        let (ei, ej, ek) = (self.unit(i), self.unit(j), self.unit(k));
        let t1 = self.bracket(&ei, self.basis_bracket(j, k));
        let t2 = self.bracket(&ej, self.basis_bracket(k, i));
        let t3 = self.bracket(&ek, self.basis_bracket(i, j));
        t1.into_iter()
            .zip(t2)
            .zip(t3)
            .map(|((a, b), c)| (a + b + c).magnitude())
            .fold(0.0, f64::max)
    }

    /// Antisymmetry defect `max_k |c[i][j][k] + c[j][i][k]|`.
    pub fn antisymmetry_defect(&self, i: usize, j: usize) -> f64 {
        (0..self.dim)
            .map(|k| (self.get(i, j, k).clone() + self.get(j, i, k).clone()).magnitude())
            .fold(0.0, f64::max)
    }

    /// All `i < j < k` triples whose Jacobi defect exceeds `tol`.
    pub fn jacobi_violations(&self, tol: f64) -> Vec<((usize, usize, usize), f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let d = self.jacobi_defect(i, j, k);
                    if d > tol {
                        out.push(((i, j, k), d));
                    }
                }
            }
        }
        out
    }
}
