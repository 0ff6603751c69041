//! The regular representation of a graded nilpotent group, Gaussian
//! almost-invariant vectors and their translation overlaps.

mod family;
mod gaussian;
mod overlap;
mod shift;

pub use family::{regular_cocycle, RegularFamily, TranslateCombo, TranslateTerm, MERGE_TOL};
pub use gaussian::GaussianVector;
pub use overlap::{Certificate, McConfig, Overlap, OverlapPath, RegularRep, EXPONENT_WINDOW};
pub use shift::ShiftPolynomials;
