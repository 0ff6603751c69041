//! Special representations of graded nilpotent Lie groups, their
//! nontrivial 1-cocycles, and quasi-Poisson representations of the
//! associated current groups.

pub mod canonical;
pub mod error;
pub mod heisenberg;
pub mod lie_core;
pub mod numeric;
pub mod poisson;
pub mod regular;
pub mod scalar;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision graded algebra.
pub type Algebra = lie_core::GradedAlgebra<f64>;
/// Single-precision graded algebra.
pub type Algebra32 = lie_core::GradedAlgebra<f32>;
/// Exact rational graded algebra.
pub type ExactAlgebra = lie_core::GradedAlgebra<num_rational::Rational64>;
/// Double-precision group/algebra element.
pub type GroupElement = lie_core::Element<f64>;
/// Exact rational group/algebra element.
pub type ExactElement = lie_core::Element<num_rational::Rational64>;
