//! Scalar types the Lie-algebra layer is generic over.

use std::fmt::Debug;
use std::ops::Neg;

use num_rational::Rational64;
use num_traits::{Num, Signed};

/// Coefficient field for structure constants and canonical coordinates.
///
/// Implemented for `f32`, `f64` and exact `Rational64`; identity checks use
/// [`Scalar::identity_tolerance`], which is zero for the exact type.
pub trait Scalar:
    Num + Signed + Neg<Output = Self> + Clone + PartialOrd + Debug + Send + Sync + 'static
{
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Magnitude as `f64`, used for diagnostics only.
    fn magnitude(&self) -> f64;

    fn identity_tolerance() -> f64;
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn identity_tolerance() -> f64 {
        1e-12
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn magnitude(&self) -> f64 {
        self.abs() as f64
    }
    fn identity_tolerance() -> f64 {
        1e-4
    }
}

impl Scalar for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }
    fn magnitude(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn identity_tolerance() -> f64 {
        0.0
    }
}
