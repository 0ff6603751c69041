use std::collections::HashMap;

use rand::Rng;

use super::algebra::GradedAlgebra;
use super::tensor::StructureTensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Canonical coordinates `(a_1, ..., a_n)` flattened level by level. The
/// same layout serves algebra and group elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Element<T> {
    coords: Vec<T>,
}

impl<T: Scalar> Element<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![T::zero(); dim])
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().cloned().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coords.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Largest coordinate magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

/// A pair `(r, g)` in `R*_+ ⋉ G`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemidirectElement<T> {
    pub scale: T,
    pub body: Element<T>,
}

fn check_scale<T: Scalar>(r: &T) -> Result<()> {
    if *r > T::zero() {
        Ok(())
    } else {
        Err(Error::NonPositiveScale(if r.is_negative() {
            -r.magnitude()
        } else {
            0.0
        }))
    }
}

impl<T: Scalar> GradedAlgebra<T> {
    pub fn check(&self, a: &Element<T>) -> Result<()> {
        if a.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch {
                expected: self.dim(),
                got: a.len(),
            })
        }
    }

    pub fn element(&self, coords: Vec<T>) -> Result<Element<T>> {
        let e = Element::new(coords);
        self.check(&e)?;
        Ok(e)
    }

    pub fn zero(&self) -> Element<T> {
        Element::zero(self.dim())
    }

    /// Basis vector `e_i`.
    pub fn basis(&self, i: usize) -> Element<T> {
        let mut e = self.zero();
        e.coords[i] = T::one();
        e
    }

    /// Level-`k` block of `a` (1-based).
    pub fn component<'a>(&self, a: &'a Element<T>, k: usize) -> &'a [T] {
        &a.coords[self.level_range(k)]
    }

    pub fn bracket(&self, a: &Element<T>, b: &Element<T>) -> Result<Element<T>> {
        self.check(a)?;
        self.check(b)?;
        Ok(Element::new(self.structure().bracket(&a.coords, &b.coords)))
    }

    /// Product in exponential coordinates: the Dynkin series summed over
    /// left-normed brackets of depth at most the class.
    pub fn group_mul(&self, a: &Element<T>, b: &Element<T>) -> Result<Element<T>> {
        self.check(a)?;
        self.check(b)?;
        let letters = [&a.coords, &b.coords];
        let mut cache: HashMap<Vec<u8>, Option<Vec<T>>> = HashMap::new();
        let mut out = vec![T::zero(); self.dim()];
        for (word, coef) in self.bch_terms() {
            if let Some(v) = self.left_normed(word, letters, &mut cache) {
                for (o, x) in out.iter_mut().zip(v) {
                    *o = o.clone() + coef.clone() * x;
                }
            }
        }
        Ok(Element::new(out))
    }

    /// Left-normed bracket `[[..[w_1, w_2], ..], w_m]` of the letters, or
    /// `None` when it vanishes. Prefixes are memoized.
    fn left_normed(
        &self,
        word: &[u8],
        letters: [&Vec<T>; 2],
        cache: &mut HashMap<Vec<u8>, Option<Vec<T>>>,
    ) -> Option<Vec<T>> {
        if word.len() == 1 {
            return Some(letters[word[0] as usize].clone());
        }
        if let Some(v) = cache.get(word) {
            return v.clone();
        }
        let value = self
            .left_normed(&word[..word.len() - 1], letters, cache)
            .map(|p| self.structure().bracket(&p, letters[word[word.len() - 1] as usize]))
            .filter(|v| v.iter().any(|x| !x.is_zero()));
        cache.insert(word.to_vec(), value.clone());
        value
    }

    /// `p(a, b) = a·b - a - b`; its level-`k` block depends only on levels `< k`.
    pub fn bch_correction(&self, a: &Element<T>, b: &Element<T>) -> Result<Element<T>> {
        Ok(self.group_mul(a, b)?.sub(&a.add(b)))
    }

    pub fn group_inv(&self, a: &Element<T>) -> Result<Element<T>> {
        self.check(a)?;
        Ok(a.neg())
    }

    /// `a_k -> r^k a_k`.
    pub fn dilate(&self, r: &T, a: &Element<T>) -> Result<Element<T>> {
        check_scale(r)?;
        self.check(a)?;
        let mut out = a.clone();
        let mut rk = T::one();
        for k in 1..=self.class() {
            rk = rk * r.clone();
            for i in self.level_range(k) {
                out.coords[i] = out.coords[i].clone() * rk.clone();
            }
        }
        Ok(out)
    }

    pub fn semidirect(&self, scale: T, body: Element<T>) -> Result<SemidirectElement<T>> {
        check_scale(&scale)?;
        self.check(&body)?;
        Ok(SemidirectElement { scale, body })
    }

    /// `(r1, g1)(r2, g2) = (r1 r2, g1 · dilate(r1, g2))`.
    pub fn semidirect_mul(
        &self,
        p: &SemidirectElement<T>,
        q: &SemidirectElement<T>,
    ) -> Result<SemidirectElement<T>> {
        check_scale(&p.scale)?;
        check_scale(&q.scale)?;
        let moved = self.dilate(&p.scale, &q.body)?;
        Ok(SemidirectElement {
            scale: p.scale.clone() * q.scale.clone(),
            body: self.group_mul(&p.body, &moved)?,
        })
    }

    pub fn semidirect_inv(&self, p: &SemidirectElement<T>) -> Result<SemidirectElement<T>> {
        check_scale(&p.scale)?;
        let inv_scale = T::one() / p.scale.clone();
        Ok(SemidirectElement {
            body: self.dilate(&inv_scale, &p.body.neg())?,
            scale: inv_scale,
        })
    }

    /// `D a_k = k a_k`.
    pub fn derivation_apply(&self, a: &Element<T>) -> Result<Element<T>> {
        self.check(a)?;
        let mut out = a.clone();
        for k in 1..=self.class() {
            let kk = T::from_ratio(k as i64, 1);
            for i in self.level_range(k) {
                out.coords[i] = out.coords[i].clone() * kk.clone();
            }
        }
        Ok(out)
    }

    /// Structure constants of `L ⊕ {D}`, with `D` as the last basis vector.
    pub fn extended_structure(&self) -> StructureTensor<T> {
        let n = self.dim();
        let c = self.structure();
        let mut ext = StructureTensor::zeros(n + 1);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    ext.set(i, j, k, c.get(i, j, k).clone());
                }
            }
            let k = T::from_ratio(self.level(i) as i64, 1);
            ext.set(n, i, i, k.clone());
            ext.set(i, n, i, -k);
        }
        ext
    }

    /// Bracket on `L ⊕ {D}`: `[(t, a), (s, b)] = (0, t Db - s Da + [a, b])`.
    pub fn extended_bracket(
        &self,
        a: (&T, &Element<T>),
        b: (&T, &Element<T>),
    ) -> Result<(T, Element<T>)> {
        let ab = self.bracket(a.1, b.1)?;
        let db = self.derivation_apply(b.1)?.scale(a.0);
        let da = self.derivation_apply(a.1)?.scale(b.0);
        Ok((T::zero(), ab.add(&db).sub(&da)))
    }
}

impl GradedAlgebra<f64> {
    /// Uniform draw in the coordinate box, rescaled to max-norm at most `bound`.
    pub fn sample_element<R: Rng + ?Sized>(&self, rng: &mut R, bound: f64) -> Element<f64> {
        Element::new((0..self.dim()).map(|_| rng.gen_range(-bound..=bound)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn class_two_product_is_exact() {
        let alg = GradedAlgebra::<Rational64>::heisenberg(2).unwrap();
        let r = |n, d| Rational64::new(n, d);
        let a = alg.element(vec![r(1, 1), r(0, 1), r(0, 1)]).unwrap();
        let b = alg.element(vec![r(0, 1), r(1, 1), r(0, 1)]).unwrap();
        let ab = alg.group_mul(&a, &b).unwrap();
        assert_eq!(ab.coords(), &[r(1, 1), r(1, 1), r(1, 2)]);
    }

    #[test]
    fn mismatch_and_scale_errors() {
        let alg = GradedAlgebra::<f64>::heisenberg(2).unwrap();
        let short = Element::new(vec![1.0, 2.0]);
        assert!(matches!(
            alg.group_mul(&short, &alg.zero()),
            Err(Error::AlgebraMismatch { expected: 3, got: 2 })
        ));
        assert!(matches!(
            alg.dilate(&-1.0, &alg.zero()),
            Err(Error::NonPositiveScale(s)) if s == -1.0
        ));
        assert!(matches!(
            alg.dilate(&0.0, &alg.zero()),
            Err(Error::NonPositiveScale(_))
        ));
    }

    #[test]
    fn extended_bracket_on_heisenberg() {
        let alg = GradedAlgebra::<f64>::heisenberg(2).unwrap();
        let (x, y, t) = (alg.basis(0), alg.basis(1), alg.basis(2));
        let zero = alg.zero();
        let (_, dx) = alg.extended_bracket((&1.0, &zero), (&0.0, &x)).unwrap();
        assert_eq!(dx, x);
        let (_, dt) = alg.extended_bracket((&1.0, &zero), (&0.0, &t)).unwrap();
        assert_eq!(dt, t.scale(&2.0));
        let (_, dd) = alg.extended_bracket((&1.0, &zero), (&1.0, &zero)).unwrap();
        assert_eq!(dd, zero);
        let _ = y;
    }
}
