//! Graded nilpotent Lie algebras, their groups in exponential coordinates,
//! dilations, the derivation extension and the semidirect product with
//! `R*_+`.

mod algebra;
pub mod bch;
mod file;
mod group;
mod tensor;

pub use algebra::{Diagnostic, GradedAlgebra};
pub use file::AlgebraFile;
pub use group::{Element, SemidirectElement};
pub use tensor::StructureTensor;
