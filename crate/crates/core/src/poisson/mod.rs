//! Poisson and quasi-Poisson measures on configurations over
//! `Y = R*_+ x [0, 1]`, the `(R*_+)^X` action, and current-group operators
//! on product states.

pub mod charfunc;
pub mod current;
pub mod mc;
pub mod space;
pub mod tensor;

pub use charfunc::{
    campbell_value, charfunc_analytic, charfunc_mc, radon_nikodym_check, McEstimate, Piece,
    RadialTerm, RnEntry, RnReport, TestFunction, LEAKAGE_BOUND, Z_MAX,
};
pub use current::{
    act_on_configuration, current_inv, current_mul, scale_part, CurrentElement, Transported,
};
pub use mc::{moments, Moments};
pub use space::{BaseSpace, Configuration, Convention};
pub use tensor::{
    coherent_inner, current_apply, heis_current_apply, projective_check, qps_inner_mc,
    rho_integral, un1_current_apply, CurrentSection, PState, ProjectiveCheck, TensorState, UState,
};
