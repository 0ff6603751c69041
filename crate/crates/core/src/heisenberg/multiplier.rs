use num_complex::Complex64;

use super::coherent::{direct_inner, CoherentCombination, DomainPoint};
use super::unitary::{mobius_action, UnMatrix};
use crate::error::Result;

fn orbit(g: &UnMatrix) -> Result<DomainPoint> {
    mobius_action(g, &DomainPoint::base(g.n() - 1))
}

/// `b(g) = f_{g v0} - f_{v0}`.
pub fn cocycle(g: &UnMatrix) -> Result<CoherentCombination> {
    Ok(CoherentCombination::difference(
        orbit(g)?,
        DomainPoint::base(g.n() - 1),
    ))
}

fn base_section(n: usize) -> CoherentCombination {
    CoherentCombination::single(DomainPoint::base(n - 1))
}

/// `λ(g0, g) = -‖b(g0)‖^2 / 2 - Re⟨b(g0), f⟩ - ⟨T~(g0) b(g), T~(g0) f⟩ + ⟨b(g), f⟩`
/// with `f = f_{v0}`, `T~(g0) b(g) = f_{g0 g v0} - f_{g0 v0}` and
/// `T~(g0) f = f_{g0 v0}`. Complex: the real part scales, the imaginary
/// part is a phase.
pub fn lambda_multiplier(g0: &UnMatrix, g: &UnMatrix) -> Result<Complex64> {
    let f = base_section(g0.n());
    let b0 = cocycle(g0)?;
    let b = cocycle(g)?;
    let moved = CoherentCombination::difference(orbit(&g0.mul(g))?, orbit(g0)?);
    let moved_f = CoherentCombination::single(orbit(g0)?);
    Ok(-0.5 * direct_inner(&b0, &b0)?.re - direct_inner(&b0, &f)?.re - direct_inner(&moved, &moved_f)?
        + direct_inner(&b, &f)?)
}

/// `ρ(g1, g2) = -Im⟨b(g2), b(g1^{-1})⟩ + Im⟨b(g1 g2) - b(g1) - b(g2), f⟩`.
pub fn rho_multiplier(g1: &UnMatrix, g2: &UnMatrix) -> Result<f64> {
    let n = g1.n();
    let base = DomainPoint::base(n - 1);
    let one = Complex64::new(1.0, 0.0);
    let first = direct_inner(&cocycle(g2)?, &cocycle(&g1.inv())?)?.im;
    let coboundary = CoherentCombination {
        terms: vec![
            (one, orbit(&g1.mul(g2))?),
            (-one, orbit(g1)?),
            (-one, orbit(g2)?),
            (one, base),
        ],
    };
    Ok(-first + direct_inner(&coboundary, &base_section(n))?.im)
}
