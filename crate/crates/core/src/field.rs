//! Scalar fields on the complex plane.
//!
//! Every quadrature routine in the crate consumes a [`Field`]. A field may
//! return `-inf` at isolated singular points (logarithmic poles); it lists
//! those points so the integrators can place breakpoints on them and never
//! evaluate exactly there.

use num_complex::Complex64;

pub trait Field: Sync {
    fn eval(&self, z: Complex64) -> f64;

    /// Points where the field is singular or not smooth.
    fn singular_points(&self) -> Vec<Complex64> {
        Vec::new()
    }

    /// Center of rotational symmetry, if the field depends on `|z - c|` only.
    fn radial_center(&self) -> Option<Complex64> {
        None
    }

    /// Closed-form normalized mean over `|w - center| = radius`, when known.
    fn exact_circle_mean(&self, _center: Complex64, _radius: f64) -> Option<f64> {
        None
    }
}

impl<F> Field for F
where
    F: Fn(Complex64) -> f64 + Sync,
{
    fn eval(&self, z: Complex64) -> f64 {
        self(z)
    }
}

/// A closure together with its singular set.
pub struct WithSingularities<F> {
    pub f: F,
    pub points: Vec<Complex64>,
}

impl<F> WithSingularities<F> {
    pub fn new(f: F, points: Vec<Complex64>) -> Self {
        Self { f, points }
    }
}

impl<F: Fn(Complex64) -> f64 + Sync> Field for WithSingularities<F> {
    fn eval(&self, z: Complex64) -> f64 {
        (self.f)(z)
    }

    fn singular_points(&self) -> Vec<Complex64> {
        self.points.clone()
    }
}

/// A closure depending on the distance to `center` only.
pub struct Radial<F> {
    pub center: Complex64,
    pub profile: F,
}

impl<F: Fn(f64) -> f64 + Sync> Field for Radial<F> {
    fn eval(&self, z: Complex64) -> f64 {
        (self.profile)((z - self.center).norm())
    }

    fn singular_points(&self) -> Vec<Complex64> {
        vec![self.center]
    }

    fn radial_center(&self) -> Option<Complex64> {
        Some(self.center)
    }
}

/// Hides any closed-form circle mean so integrals go through quadrature.
pub struct QuadratureOnly<'a, F: ?Sized>(pub &'a F);

impl<F: Field + ?Sized> Field for QuadratureOnly<'_, F> {
    fn eval(&self, z: Complex64) -> f64 {
        self.0.eval(z)
    }

    fn singular_points(&self) -> Vec<Complex64> {
        self.0.singular_points()
    }

    fn radial_center(&self) -> Option<Complex64> {
        self.0.radial_center()
    }
}
