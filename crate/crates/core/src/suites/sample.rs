//! Random inputs shared by the suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::canonical::{RadialGrid, Scaled};
use crate::heisenberg::{DomainPoint, HeisElement, UnMatrix};
use crate::poisson::CurrentElement;

pub(crate) fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn heis<R: Rng>(rng: &mut R, m: usize, spread: f64) -> HeisElement {
    let z = (0..m)
        .map(|_| cx(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)))
        .collect();
    HeisElement::from_tz(rng.gen_range(-spread..spread), z)
}

/// A Heisenberg element with `|z| <= radius`.
pub(crate) fn heis_in_ball<R: Rng>(rng: &mut R, m: usize, radius: f64) -> HeisElement {
    let mut g = heis(rng, m, 1.0);
    let n = g.z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let target = radius * rng.gen_range(0.0..1.0f64).sqrt();
    if n > 0.0 {
        g.z.iter_mut().for_each(|c| *c *= target / n);
    }
    HeisElement::from_tz(g.t(), g.z)
}

pub(crate) fn point<R: Rng>(rng: &mut R, m: usize) -> DomainPoint {
    let b: Vec<Complex64> = (0..m)
        .map(|_| cx(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)))
        .collect();
    let b2: f64 = b.iter().map(|c| c.norm_sqr()).sum();
    let gap = rng.gen_range(0.2..2.0);
    DomainPoint::new(cx(-0.5 * (gap + b2), rng.gen_range(-1.0..1.0)), b)
        .expect("sampled point lies in the domain")
}

/// Scale a random grid power in `[-k, k]`.
pub(crate) fn grid_scaled<R: Rng>(rng: &mut R, grid: &RadialGrid, k: i64, g: HeisElement) -> Scaled<HeisElement> {
    Scaled::new(grid.power(rng.gen_range(-k..=k)), g)
}

pub(crate) fn scaled<R: Rng>(rng: &mut R, m: usize) -> Scaled<HeisElement> {
    Scaled::new(rng.gen_range(0.3f64..3.0), heis(rng, m, 1.0))
}

/// Symmetric positive definite with eigenvalues in roughly `[0.3, 2]`.
pub(crate) fn spd<R: Rng>(rng: &mut R, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = a.qr().q();
    let eig = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| rng.gen_range(0.3..2.0)));
    let m = &q * eig * q.transpose();
    (&m + m.transpose()) * 0.5
}

pub(crate) fn cuts<R: Rng>(rng: &mut R, cells: usize) -> Vec<f64> {
    let mut inner: Vec<f64> = (1..cells).map(|_| rng.gen_range(0.05..0.95)).collect();
    inner.sort_by(f64::total_cmp);
    let mut c = vec![0.0];
    c.extend(inner);
    c.push(1.0);
    c
}

pub(crate) fn p_current<R: Rng>(rng: &mut R, cells: usize, m: usize) -> CurrentElement<Scaled<HeisElement>> {
    let c = cuts(rng, cells);
    let values = (0..cells)
        .map(|_| Scaled::new(rng.gen_range(0.5..2.0), heis(rng, m, 0.8)))
        .collect();
    CurrentElement::new(c, values).expect("sorted cuts")
}

pub(crate) fn u_current<R: Rng>(rng: &mut R, cells: usize, n: usize) -> CurrentElement<UnMatrix> {
    let c = cuts(rng, cells);
    let values = (0..cells).map(|_| UnMatrix::random(rng, n, 0.5)).collect();
    CurrentElement::new(c, values).expect("sorted cuts")
}

/// Distance to the nearest multiple of `2π`.
pub(crate) fn wrap(x: f64) -> f64 {
    let t = std::f64::consts::TAU;
    x - t * (x / t).round()
}
