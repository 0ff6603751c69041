//! The Heisenberg group of order `2n - 1`, its Fock representation, the
//! special representation of `P = R*_+ ⋉ N` on coherent sections, the
//! embedding `P ⊂ U(n, 1)`, and the multipliers `λ`, `ρ`.

pub mod coherent;
pub mod fock;
pub mod group;
pub mod multiplier;
pub mod special;
pub mod unitary;

pub use coherent::{
    coherent_vector, difference_norm_sq, direct_inner, kernel_exponent, CoherentCombination, CoherentCombo, DomainPoint,
    HeisenbergFamily,
};
pub use fock::{irrep_apply, FockTruncation, FockVector, IrrepAction};
pub use group::HeisElement;
pub use multiplier::{cocycle, lambda_multiplier, rho_multiplier};
pub use special::{coherent_fock_vector, special_apply, FockFamily};
pub use unitary::{extended_apply, matrix_of, mobius_action, pu_decompose, UnMatrix};
