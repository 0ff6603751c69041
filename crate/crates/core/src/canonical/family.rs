use num_complex::Complex64;

/// A canonical family `T_r(g) = T(g^r)` of unitary representations of a
/// dilation-graded group on a fixed space `K`.
///
/// Vectors are formal linear combinations owned by the implementation;
/// [`RepFamily::combine`] is expected to merge coincident terms so that an
/// exactly cancelling combination evaluates to a (near) zero vector rather
/// than to round-off in the Gram expansion.
pub trait RepFamily: Sync {
    type Group: Clone + Send + Sync + std::fmt::Debug;
    type Vector: Clone + Send + Sync + std::fmt::Debug;

    fn identity(&self) -> Self::Group;
    fn mul(&self, a: &Self::Group, b: &Self::Group) -> Self::Group;
    fn inv(&self, a: &Self::Group) -> Self::Group;
    /// The dilation automorphism `g -> g^r`.
    fn dilate(&self, r: f64, g: &Self::Group) -> Self::Group;

    /// Base representation `T(g) v`.
    fn act(&self, g: &Self::Group, v: &Self::Vector) -> Self::Vector;

    /// `T_r(g) v = T(g^r) v`.
    fn apply(&self, r: f64, g: &Self::Group, v: &Self::Vector) -> Self::Vector {
        self.act(&self.dilate(r, g), v)
    }

    /// `sum_j c_j v_j`; the empty sum is the zero vector.
    fn combine(&self, terms: &[(Complex64, &Self::Vector)]) -> Self::Vector;

    /// Linear in the first argument.
    fn inner(&self, a: &Self::Vector, b: &Self::Vector) -> Complex64;

    fn norm_sq(&self, v: &Self::Vector) -> f64 {
        self.inner(v, v).re.max(0.0)
    }

    /// `||T_r(g) h - h||^2`. Implementations with a closed-form overlap
    /// should override this to avoid cancellation.
    fn defect_sq(&self, r: f64, g: &Self::Group, h: &Self::Vector) -> f64 {
        let th = self.apply(r, g, h);
        let one = Complex64::new(1.0, 0.0);
        self.norm_sq(&self.combine(&[(one, &th), (-one, h)]))
    }
}

/// An element `(r, g)` of `R*_+ ⋉ G` for a family's group `G`, with law
/// `(r1, g1)(r2, g2) = (r1 r2, g1 · g2^{r1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaled<G> {
    pub scale: f64,
    pub body: G,
}

impl<G: Clone> Scaled<G> {
    pub fn new(scale: f64, body: G) -> Self {
        Self { scale, body }
    }
}

pub fn scaled_identity<F: RepFamily>(fam: &F) -> Scaled<F::Group> {
    Scaled::new(1.0, fam.identity())
}

pub fn scaled_mul<F: RepFamily>(
    fam: &F,
    p: &Scaled<F::Group>,
    q: &Scaled<F::Group>,
) -> Scaled<F::Group> {
    Scaled::new(
        p.scale * q.scale,
        fam.mul(&p.body, &fam.dilate(p.scale, &q.body)),
    )
}

pub fn scaled_inv<F: RepFamily>(fam: &F, p: &Scaled<F::Group>) -> Scaled<F::Group> {
    let s = 1.0 / p.scale;
    Scaled::new(s, fam.dilate(s, &fam.inv(&p.body)))
}
