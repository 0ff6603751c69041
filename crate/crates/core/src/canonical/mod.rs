//! Canonical families over a radial measure, the direct-integral special
//! representation, its extension by scales, and its 1-cocycles.

mod family;
mod grid;
mod ops;
mod vector;

pub use family::{scaled_identity, scaled_inv, scaled_mul, RepFamily, Scaled};
pub use grid::{RadialGrid, RadialMeasure, RadialProfile, TailEstimate, TAIL_ALPHA_MIN, TAIL_NODES};
pub use ops::{
    almost_invariance_defect, invariance_probe, scaling_exponent, tilde_apply, CanonicalRep, DefectReport,
    IdentityDefect, Reduction, Shifted, INVARIANT_FLOOR, UNIT_TOL,
};
pub use vector::DirectIntegralVector;
