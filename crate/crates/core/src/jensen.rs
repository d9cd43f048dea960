//! Jensen measures centred at a pole, their logarithmic potentials, the
//! measure/potential bijection, the Poisson–Jensen identity and disk Green
//! functions.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, QuadratureOnly};
use crate::geometry::Region;
use crate::majorants::SubharmonicModel;
use crate::means::circle_mean;
use crate::measures::Extended;
use crate::quadrature::{integrate, try_integrate, Quadrature, Tolerance};

/// Normalization of `(1 - x²)³` on `[-1, 1]`.
const BUMP_NORM: f64 = 35.0 / 32.0;

/// Rotation-invariant probability carrier centred at the pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Carrier {
    Dirac,
    /// Normalized arc length on `|z - pole| = radius`.
    Circle { radius: f64 },
    /// Radial density `q(s) ds dθ/2π` on `inner <= |z - pole| <= outer`,
    /// `q` a normalized `(1 - x²)³` bump in `s`.
    Annulus { inner: f64, outer: f64 },
}

impl Carrier {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Carrier::Dirac => true,
            Carrier::Circle { radius } => radius > 0.0 && radius.is_finite(),
            Carrier::Annulus { inner, outer } => inner >= 0.0 && outer > inner && outer.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad carrier {self:?}")))
        }
    }

    fn reach(&self) -> f64 {
        match *self {
            Carrier::Dirac => 0.0,
            Carrier::Circle { radius } => radius,
            Carrier::Annulus { outer, .. } => outer,
        }
    }

    fn annulus_density(inner: f64, outer: f64, s: f64) -> f64 {
        let half = 0.5 * (outer - inner);
        let x = (s - 0.5 * (inner + outer)) / half;
        if x.abs() >= 1.0 {
            0.0
        } else {
            BUMP_NORM * (1.0 - x * x).powi(3) / half
        }
    }

    /// `∫ ln|z' - z| dμ(z') - ln|z - pole|` at distance `d > 0` from the pole.
    fn potential(&self, d: f64) -> f64 {
        match *self {
            Carrier::Dirac => 0.0,
            Carrier::Circle { radius } => (radius / d).ln().max(0.0),
            Carrier::Annulus { inner, outer } => {
                if d >= outer {
                    return 0.0;
                }
                integrate(
                    |s| Self::annulus_density(inner, outer, s) * (s / d).ln().max(0.0),
                    d.max(inner),
                    outer,
                    &[],
                    Tolerance::absolute(1e-14).with_rel(1e-13),
                )
                .map(|q| q.value)
                .unwrap_or(f64::NAN)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenPart {
    pub weight: f64,
    pub carrier: Carrier,
}

/// Finite convex combination of carriers centred at `pole`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JensenMeasure {
    #[serde(with = "crate::geometry::complex_json")]
    pub pole: Complex64,
    parts: Vec<JensenPart>,
}

const MASS_TOL: f64 = 1e-9;

impl JensenMeasure {
    pub fn new(pole: Complex64, parts: Vec<JensenPart>) -> Result<Self> {
        for p in &parts {
            p.carrier.validate()?;
            if !(p.weight >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative weight {}", p.weight)));
            }
        }
        let total: f64 = parts.iter().map(|p| p.weight).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter(format!("total mass {total} is not 1")));
        }
        Ok(Self { pole, parts })
    }

    pub fn dirac(pole: Complex64) -> Self {
        Self {
            pole,
            parts: vec![JensenPart {
                weight: 1.0,
                carrier: Carrier::Dirac,
            }],
        }
    }

    pub fn annulus(pole: Complex64, inner: f64, outer: f64) -> Result<Self> {
        Self::new(
            pole,
            vec![JensenPart {
                weight: 1.0,
                carrier: Carrier::Annulus { inner, outer },
            }],
        )
    }

    /// `alpha μ1 + (1 - alpha) μ2` for measures with a common pole.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        if self.pole != other.pole {
            return Err(Error::InvalidParameter("mixed measures need a common pole".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("mixing weight {alpha} outside [0, 1]")));
        }
        let parts = self
            .parts
            .iter()
            .map(|p| JensenPart {
                weight: alpha * p.weight,
                ..*p
            })
            .chain(other.parts.iter().map(|p| JensenPart {
                weight: (1.0 - alpha) * p.weight,
                ..*p
            }))
            .collect();
        Self::new(self.pole, parts)
    }

    pub fn parts(&self) -> &[JensenPart] {
        &self.parts
    }

    pub fn support_radius(&self) -> f64 {
        self.parts.iter().map(|p| p.carrier.reach()).fold(0.0, f64::max)
    }

    pub fn total_mass(&self) -> f64 {
        self.parts.iter().map(|p| p.weight).sum()
    }

    /// `∫ u dμ`.
    pub fn integrate<F: Field + ?Sized>(&self, u: &F, tol: f64) -> Result<Quadrature> {
        let per_part = tol / self.parts.len().max(1) as f64;
        let mut total = Quadrature::exact(0.0);
        for p in &self.parts {
            if p.weight == 0.0 {
                continue;
            }
            let q = match p.carrier {
                Carrier::Dirac => Quadrature::exact(u.eval(self.pole)),
                Carrier::Circle { radius } => circle_mean(u, self.pole, radius, per_part)?,
                Carrier::Annulus { inner, outer } => {
                    let cuts: Vec<f64> = u.singular_points().iter().map(|w| (w - self.pole).norm()).collect();
                    try_integrate(
                        |s| {
                            let q = Carrier::annulus_density(inner, outer, s);
                            if q == 0.0 {
                                return Ok(0.0);
                            }
                            Ok(q * circle_mean(u, self.pole, s, per_part / 2.0)?.value)
                        },
                        inner,
                        outer,
                        &cuts,
                        Tolerance::absolute(per_part / 2.0),
                    )?
                }
            };
            total = total.add(q.scaled(p.weight));
        }
        Ok(total)
    }
}

/// Uniform probability on the circle `|z - pole| = t`; the circle must lie in
/// `domain` when one is given.
pub fn uniform_circle(pole: Complex64, t: f64, domain: Option<&Region>) -> Result<JensenMeasure> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("circle radius must be positive, got {t}")));
    }
    if let Some(d) = domain {
        if !circle_inside(d, pole, t) {
            return Err(Error::OutOfDomain(format!("circle |z - {pole}| = {t} leaves {d:?}")));
        }
    }
    JensenMeasure::new(
        pole,
        vec![JensenPart {
            weight: 1.0,
            carrier: Carrier::Circle { radius: t },
        }],
    )
}

fn circle_inside(domain: &Region, center: Complex64, t: f64) -> bool {
    match *domain {
        Region::Disk { center: c, radius } => (center - c).norm() + t < radius,
        Region::WholePlane => true,
        _ => (0..64).all(|k| {
            let w = center + Complex64::from_polar(t, std::f64::consts::TAU * k as f64 / 64.0);
            domain.contains(w)
        }),
    }
}

/// `V(z) = Σ w_i V_i(|z - pole|)`, a positive combination of carrier
/// potentials. The weights need not sum to one; their sum is the pole
/// coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JensenPotential {
    #[serde(with = "crate::geometry::complex_json")]
    pub pole: Complex64,
    parts: Vec<JensenPart>,
}

impl JensenPotential {
    /// A potential given by its Riesz data off the pole.
    pub fn from_parts(pole: Complex64, parts: Vec<JensenPart>) -> Result<Self> {
        for p in &parts {
            p.carrier.validate()?;
            if !(p.weight >= 0.0) {
                return Err(Error::InvalidPotential(format!("negative charge weight {}", p.weight)));
            }
        }
        Ok(Self {
            pole,
            parts: parts.into_iter().filter(|p| p.carrier != Carrier::Dirac).collect(),
        })
    }

    pub fn zero(pole: Complex64) -> Self {
        Self {
            pole,
            parts: Vec::new(),
        }
    }

    pub fn parts(&self) -> &[JensenPart] {
        &self.parts
    }

    pub fn support_radius(&self) -> f64 {
        self.parts.iter().map(|p| p.carrier.reach()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Extended {
        let d = (z - self.pole).norm();
        if d == 0.0 {
            return if self.parts.iter().any(|p| p.weight > 0.0) {
                Extended::PosInfinity
            } else {
                Extended::Finite(0.0)
            };
        }
        Extended::from_f64(self.value_at_distance(d))
    }

    /// `V(∞) = 0`.
    pub fn at_infinity(&self) -> f64 {
        0.0
    }

    fn value_at_distance(&self, d: f64) -> f64 {
        if !d.is_finite() {
            return 0.0;
        }
        self.parts.iter().map(|p| p.weight * p.carrier.potential(d)).sum()
    }

    /// `lim V(z) / (-ln|z - pole|)` at the pole, extrapolated linearly in
    /// `x = 1/(-ln r)` from radii `10^-3 .. 10^-6`.
    pub fn pole_coefficient(&self) -> f64 {
        let pts: Vec<(f64, f64)> = (3..=6)
            .map(|k| {
                let r = 10f64.powi(-k);
                let x = 1.0 / -r.ln();
                (x, self.value_at_distance(r) * x)
            })
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        my - sxy / sxx * mx
    }
}

impl Field for JensenPotential {
    fn eval(&self, z: Complex64) -> f64 {
        JensenPotential::eval(self, z).to_f64()
    }

    fn singular_points(&self) -> Vec<Complex64> {
        vec![self.pole]
    }

    fn radial_center(&self) -> Option<Complex64> {
        Some(self.pole)
    }
}

/// `V_μ(z) = ∫ ln|z' - z| dμ(z') - ln|z - pole|`.
pub fn log_potential(mu: &JensenMeasure) -> JensenPotential {
    JensenPotential {
        pole: mu.pole,
        parts: mu.parts.iter().filter(|p| p.carrier != Carrier::Dirac).copied().collect(),
    }
}

const POLE_COEFFICIENT_TOL: f64 = 1e-3;

/// `μ = Δ_V` off the pole plus `(1 - c) δ_pole`, `c` the pole coefficient.
pub fn potential_to_measure(v: &JensenPotential) -> Result<JensenMeasure> {
    let coef = v.pole_coefficient();
    if coef > 1.0 + POLE_COEFFICIENT_TOL {
        return Err(Error::InvalidPotential(format!("pole coefficient {coef} exceeds 1")));
    }
    let off_pole: f64 = v.parts.iter().map(|p| p.weight).sum();
    let mut parts = v.parts.clone();
    // The off-pole charge is known exactly; the estimate only gates validity.
    let atom = (1.0 - off_pole).max(0.0);
    if atom > 0.0 {
        parts.push(JensenPart {
            weight: atom,
            carrier: Carrier::Dirac,
        });
    }
    if off_pole > 1.0 {
        let scale = 1.0 / off_pole;
        parts.iter_mut().for_each(|p| p.weight *= scale);
    }
    JensenMeasure::new(v.pole, parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonJensen {
    pub value_at_pole: f64,
    pub measure_integral: f64,
    pub potential_integral: f64,
    pub residual: f64,
}

/// `|u(z0) - (∫ u dμ - ∫ V_μ dΔ_u)|`. The charge integral runs over the whole
/// support of `V_μ`, pole included.
pub fn poisson_jensen_check(u: &SubharmonicModel, mu: &JensenMeasure, tol: f64) -> Result<PoissonJensen> {
    let at_pole = u.eval(mu.pole);
    let value_at_pole = match at_pole {
        Extended::Finite(v) => v,
        _ => {
            return Err(Error::Precondition(format!("u(z0) = {at_pole} at the pole {}", mu.pole)));
        }
    };
    // Quadrature on purpose: closed-form means of ln|q| are this identity.
    let measure_integral = mu.integrate(&QuadratureOnly(u), tol / 2.0)?.value;
    let v = log_potential(mu);
    let support = v.support_radius();
    let potential_integral = if support == 0.0 {
        0.0
    } else {
        let region = Region::disk(mu.pole, support)?;
        u.riesz().integrate_field(&v, &region, tol / 2.0)?.value
    };
    Ok(PoissonJensen {
        value_at_pole,
        measure_integral,
        potential_integral,
        residual: (value_at_pole - (measure_integral - potential_integral)).abs(),
    })
}

/// Green function of `disk(0, R)` with pole `z0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenDisk {
    pub radius: f64,
    pub pole: Complex64,
}

pub fn green_disk(radius: f64, pole: Complex64) -> Result<GreenDisk> {
    if !(radius > 0.0 && radius.is_finite()) || pole.norm() >= radius {
        return Err(Error::InvalidParameter(format!("pole {pole} must lie inside disk(0, {radius})")));
    }
    Ok(GreenDisk { radius, pole })
}

impl GreenDisk {
    /// `ln|R² - conj(z0) z| - ln(R |z - z0|)`.
    pub fn eval(&self, z: Complex64) -> Extended {
        let d = (z - self.pole).norm();
        if d == 0.0 {
            return Extended::PosInfinity;
        }
        let r2 = Complex64::new(self.radius * self.radius, 0.0);
        Extended::Finite((r2 - self.pole.conj() * z).norm().ln() - (self.radius * d).ln())
    }
}

impl Field for GreenDisk {
    fn eval(&self, z: Complex64) -> f64 {
        GreenDisk::eval(self, z).to_f64()
    }

    fn singular_points(&self) -> Vec<Complex64> {
        vec![self.pole]
    }

    fn radial_center(&self) -> Option<Complex64> {
        (self.pole.norm() == 0.0).then_some(self.pole)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::WithSingularities;
    use crate::majorants::{make_harmonic, make_log_abs_poly_from_roots};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn uniform_circle_integrals() {
        let mu = uniform_circle(c(0.0, 0.0), 1.0, None).unwrap();
        let log = WithSingularities::new(|w: Complex64| w.norm().ln(), vec![c(0.0, 0.0)]);
        assert!(mu.integrate(&log, 1e-12).unwrap().value.abs() < 1e-12);
        let sq = |w: Complex64| w.norm_sqr();
        assert!((mu.integrate(&sq, 1e-12).unwrap().value - 1.0).abs() < 1e-12);
        let z0 = c(0.3, 0.4);
        let mu2 = uniform_circle(z0, 2.0, None).unwrap();
        let h = |w: Complex64| (w * w).re;
        assert!((mu2.integrate(&h, 1e-12).unwrap().value - h(z0)).abs() < 1e-11);
        let disk = Region::disk(c(0.0, 0.0), 1.0).unwrap();
        assert!(matches!(uniform_circle(c(0.5, 0.0), 0.6, Some(&disk)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn circle_potential_closed_form() {
        let v = log_potential(&uniform_circle(c(0.0, 0.0), 2.0, None).unwrap());
        assert_eq!(v.eval(c(0.5, 0.0)), Extended::Finite((4.0f64).ln()));
        assert_eq!(v.eval(c(3.0, 0.0)), Extended::Finite(0.0));
        assert_eq!(v.eval(c(0.0, 0.0)), Extended::PosInfinity);
        assert_eq!(v.at_infinity(), 0.0);
        let unit = log_potential(&uniform_circle(c(0.0, 0.0), 1.0, None).unwrap());
        assert_eq!(unit.eval(c(0.6, 0.8)).finite().unwrap().abs(), 0.0);
        assert!((v.pole_coefficient() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn annulus_potential_matches_quadrature_of_logs() {
        let mu = JensenMeasure::annulus(c(0.0, 0.0), 0.5, 1.5).unwrap();
        let v = log_potential(&mu);
        for z in [c(0.2, 0.1), c(0.9, 0.0), c(0.0, 1.3), c(2.0, 0.0)] {
            let field = WithSingularities::new(move |w: Complex64| (w - z).norm().ln(), vec![z]);
            let direct = mu.integrate(&field, 1e-11).unwrap().value - z.norm().ln();
            let closed = v.eval(z).finite().unwrap();
            assert!((direct - closed).abs() < 1e-9, "{z}: {direct} vs {closed}");
        }
    }

    #[test]
    fn potential_to_measure_examples() {
        let t = 1.5;
        let v = JensenPotential::from_parts(
            c(0.0, 0.0),
            vec![JensenPart {
                weight: 1.0,
                carrier: Carrier::Circle { radius: t },
            }],
        )
        .unwrap();
        let mu = potential_to_measure(&v).unwrap();
        assert_eq!(mu.parts().len(), 1);
        let mu0 = potential_to_measure(&JensenPotential::zero(c(1.0, 0.0))).unwrap();
        assert_eq!(mu0, JensenMeasure::dirac(c(1.0, 0.0)));
        let half = JensenPotential::from_parts(
            c(0.0, 0.0),
            vec![JensenPart {
                weight: 0.5,
                carrier: Carrier::Circle { radius: t },
            }],
        )
        .unwrap();
        let mu = potential_to_measure(&half).unwrap();
        assert!((half.pole_coefficient() - 0.5).abs() < 1e-9);
        assert!(mu.parts().iter().any(|p| p.carrier == Carrier::Dirac && p.weight == 0.5));
        let over = JensenPotential::from_parts(
            c(0.0, 0.0),
            vec![JensenPart {
                weight: 1.5,
                carrier: Carrier::Circle { radius: t },
            }],
        )
        .unwrap();
        assert!(matches!(potential_to_measure(&over), Err(Error::InvalidPotential(_))));
    }

    #[test]
    fn poisson_jensen_log_linear() {
        let a = c(0.6, -0.3);
        let u = make_log_abs_poly_from_roots(c(1.0, 0.0), &[(a, 1)]).unwrap();
        let mu = uniform_circle(c(0.0, 0.0), 2.0, None).unwrap();
        let pj = poisson_jensen_check(&u, &mu, 1e-10).unwrap();
        assert!((pj.measure_integral - 2f64.ln()).abs() < 1e-10);
        assert!((pj.potential_integral - (2.0 / a.norm()).ln()).abs() < 1e-10);
        assert!(pj.residual <= 1e-8);

        let h = make_harmonic(vec![c(0.0, 0.0), c(1.0, 2.0), c(0.5, 0.0)]);
        let pj = poisson_jensen_check(&h, &uniform_circle(c(0.2, 0.1), 1.0, None).unwrap(), 1e-11).unwrap();
        assert!(pj.residual < 1e-10);

        let at_root = uniform_circle(a, 1.0, None).unwrap();
        assert!(matches!(poisson_jensen_check(&u, &at_root, 1e-8), Err(Error::Precondition(_))));
    }

    #[test]
    fn green_disk_examples() {
        let g = green_disk(1.0, c(0.5, 0.0)).unwrap();
        assert!((g.eval(c(0.0, 0.0)).finite().unwrap() - 2f64.ln()).abs() < 1e-15);
        let g = green_disk(2.0, c(0.7, -0.9)).unwrap();
        for k in 0..32 {
            let z = Complex64::from_polar(2.0, 0.2 * k as f64);
            assert!(g.eval(z).finite().unwrap().abs() <= 1e-12);
        }
        let g0 = green_disk(3.0, c(0.0, 0.0)).unwrap();
        assert!((g0.eval(c(1.0, 1.0)).finite().unwrap() - (3.0 / 2f64.sqrt()).ln()).abs() < 1e-15);
        assert!(green_disk(1.0, c(1.0, 0.0)).is_err());
    }
}
