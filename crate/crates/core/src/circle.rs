//! Integrals of fields over circles and circular arcs.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Result;
use crate::field::Field;
use crate::geometry::{angle_from, ArcSet};
use crate::quadrature::{integrate, Quadrature, Tolerance};

/// Half-width of the arc isolating each singular angle.
const ISOLATION_ARC: f64 = 1e-3;

/// Angles on the circle `|w - center| = radius` near which `f` is singular.
pub(crate) fn singular_angles<F: Field + ?Sized>(f: &F, center: Complex64, radius: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for w in f.singular_points() {
        let d = (w - center).norm();
        if d == 0.0 || (d - radius).abs() > 0.1 * radius {
            continue;
        }
        let theta = angle_from(center, w);
        for t in [theta - ISOLATION_ARC, theta, theta + ISOLATION_ARC] {
            out.push(t.rem_euclid(TAU));
        }
    }
    out
}

/// `(1/2π) ∫_{arcs} f(center + radius e^{iθ}) dθ`.
pub fn arc_mean<F: Field + ?Sized>(
    f: &F,
    center: Complex64,
    radius: f64,
    arcs: &ArcSet,
    tol: f64,
) -> Result<Quadrature> {
    let fraction = arcs.measure() / TAU;
    if fraction == 0.0 {
        return Ok(Quadrature::exact(0.0));
    }
    if radius == 0.0 {
        return Ok(Quadrature::exact(f.eval(center) * fraction));
    }
    if let Some(c) = f.radial_center() {
        if (c - center).norm() <= 1e-15 * (1.0 + center.norm()) {
            let v = f.eval(center + Complex64::new(radius, 0.0));
            return Ok(Quadrature::exact(v * fraction));
        }
    }
    let cuts = singular_angles(f, center, radius);
    let mut total = Quadrature::exact(0.0);
    let per_arc_tol = TAU * tol / arcs.arcs().len() as f64;
    for &(a, b) in arcs.arcs() {
        let q = integrate(
            |t| f.eval(center + Complex64::from_polar(radius, t)),
            a,
            b,
            &cuts,
            Tolerance::absolute(per_arc_tol),
        )?;
        total = total.add(q);
    }
    Ok(total.scaled(1.0 / TAU))
}

/// Normalized circle mean `(1/2π) ∫_0^{2π} f(center + radius e^{iθ}) dθ`.
pub fn full_circle_mean<F: Field + ?Sized>(f: &F, center: Complex64, radius: f64, tol: f64) -> Result<Quadrature> {
    if let Some(v) = f.exact_circle_mean(center, radius) {
        return Ok(Quadrature {
            value: v,
            error: 4.0 * f64::EPSILON * v.abs(),
            evaluations: 0,
        });
    }
    arc_mean(f, center, radius, &ArcSet::full(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::WithSingularities;

    #[test]
    fn log_singularity_on_circle() {
        // ln|w - 1| over |w| = 1 has mean ln max(0, 1) = 0.
        let f = WithSingularities::new(|w: Complex64| (w - 1.0).norm().ln(), vec![Complex64::new(1.0, 0.0)]);
        let q = full_circle_mean(&f, Complex64::new(0.0, 0.0), 1.0, 1e-12).unwrap();
        assert!(q.value.abs() < 1e-10, "{q:?}");
    }

    #[test]
    fn half_arc_of_linear_field() {
        let f = |w: Complex64| w.im;
        let arcs = ArcSet::full().intersect(&ArcSet::within(
            Complex64::new(0.0, 0.0),
            1.0,
            Complex64::new(0.0, 10.0),
            (101.0f64).sqrt(),
        ));
        // upper half circle: (1/2π)∫_0^π sin θ dθ = 1/π
        let q = arc_mean(&f, Complex64::new(0.0, 0.0), 1.0, &arcs, 1e-13).unwrap();
        assert!((q.value - 1.0 / std::f64::consts::PI).abs() < 1e-12);
    }
}
