//! Radius profiles and the circle, disk and mollified integral means.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::full_circle_mean;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::Field;
use crate::quadrature::{integrate, try_integrate, Quadrature, Tolerance};

/// Admissible radius function `r(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RadiusProfile {
    /// `r(z) = (1 + |z|)^(-p)` on the plane.
    PlanePower { p: f64 },
    /// `r(z) = alpha · dist(z, ∂D)` on `D = disk(0, radius)`.
    DiskFraction { alpha: f64, radius: f64 },
}

impl RadiusProfile {
    pub fn plane_power(p: f64) -> Result<Self> {
        let rp = RadiusProfile::PlanePower { p };
        rp.validate()?;
        Ok(rp)
    }

    pub fn disk_fraction(alpha: f64, radius: f64) -> Result<Self> {
        let rp = RadiusProfile::DiskFraction { alpha, radius };
        rp.validate()?;
        Ok(rp)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RadiusProfile::PlanePower { p } if p >= 0.0 && p.is_finite() => Ok(()),
            RadiusProfile::PlanePower { p } => Err(Error::InvalidParameter(format!("P must be >= 0, got {p}"))),
            RadiusProfile::DiskFraction { alpha, radius } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidParameter(format!("disk radius must be positive, got {radius}")));
                }
                Ok(())
            }
        }
    }

    /// Distance from `z` to the boundary of the domain (`+inf` on the plane).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match *self {
            RadiusProfile::PlanePower { .. } => f64::INFINITY,
            RadiusProfile::DiskFraction { radius, .. } => radius - z.norm(),
        }
    }

    pub fn in_domain(&self, z: Complex64) -> bool {
        self.boundary_distance(z) > 0.0
    }

    fn value(&self, z: Complex64) -> f64 {
        match *self {
            RadiusProfile::PlanePower { p } => (1.0 + z.norm()).powf(-p),
            RadiusProfile::DiskFraction { alpha, radius } => alpha * (radius - z.norm()),
        }
    }

    /// Bound on the Lipschitz constant of `r` over `disk(z, rho)`.
    fn lipschitz_near(&self, z: Complex64, rho: f64) -> f64 {
        match *self {
            RadiusProfile::PlanePower { p } => {
                let nearest = (z.norm() - rho).max(0.0);
                p * (1.0 + nearest).powf(-p - 1.0)
            }
            RadiusProfile::DiskFraction { alpha, .. } => alpha,
        }
    }
}

pub fn radius(rp: &RadiusProfile, z: Complex64) -> Result<f64> {
    if !rp.in_domain(z) {
        return Err(Error::OutOfDomain(format!("{z} lies outside the profile domain")));
    }
    Ok(rp.value(z))
}

/// The enlargement `r̂(z)` with a certified upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatRadius {
    pub value: f64,
    pub upper_bound: f64,
}

const HAT_ANGLES: usize = 2048;
const HAT_RINGS: usize = 32;

/// Smallest `R` with `disk(w, r(w)) ⊂ disk(z, R)` for all `w ∈ disk(z, r(z))`.
pub fn hat_radius(rp: &RadiusProfile, z: Complex64) -> Result<f64> {
    hat_radius_certified(rp, z).map(|h| h.value)
}

/// Maximizes `|w - z| + r(w)` over the closed disk `disk(z, r(z))`: a dense
/// sweep of the boundary circle refined by golden-section search, plus a
/// polar grid of the interior. The upper bound adds the Lipschitz constant
/// of the objective times the covering radius of the sample set.
pub fn hat_radius_certified(rp: &RadiusProfile, z: Complex64) -> Result<HatRadius> {
    let rz = radius(rp, z)?;
    // |w - z| is known exactly on each sampled circle.
    let objective = |s: f64, theta: f64| s + rp.value(z + Complex64::from_polar(s, theta));
    let on_circle = |theta: f64| objective(rz, theta);

    let step = TAU / HAT_ANGLES as f64;
    let (mut best, mut best_theta) = (f64::NEG_INFINITY, 0.0);
    for k in 0..HAT_ANGLES {
        let theta = step * k as f64;
        let v = on_circle(theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    // Also probe the direction towards the origin, where radially decreasing
    // profiles peak.
    if z.norm() > 0.0 {
        let theta = (-z).arg().rem_euclid(TAU);
        let v = on_circle(theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    best = best.max(golden_max(&on_circle, best_theta - step, best_theta + step));

    let mut interior = f64::NEG_INFINITY;
    for i in 0..HAT_RINGS {
        let s = rz * i as f64 / HAT_RINGS as f64;
        let n = if i == 0 { 1 } else { 256 };
        for k in 0..n {
            interior = interior.max(objective(s, TAU * k as f64 / n as f64));
        }
    }
    let value = best.max(interior);

    let lip = 1.0 + rp.lipschitz_near(z, rz);
    let boundary_gap = rz * step / 2.0;
    let interior_gap = (rz / HAT_RINGS as f64).hypot(rz * PI / 256.0);
    let upper_bound = value + lip * boundary_gap.max(interior_gap);

    if let RadiusProfile::DiskFraction { radius, .. } = *rp {
        if z.norm() + upper_bound >= radius {
            return Err(Error::Precondition(format!(
                "enlarged disk of radius {upper_bound} around {z} leaves the domain"
            )));
        }
    }
    Ok(HatRadius { value, upper_bound })
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// `u^{⊙t}(z)`: normalized mean of `u` over the circle `|w - z| = t`.
pub fn circle_mean<F: Field + ?Sized>(u: &F, z: Complex64, t: f64, tol: f64) -> Result<Quadrature> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("circle radius must be >= 0, got {t}")));
    }
    full_circle_mean(u, z, t, tol)
}

/// `u^{•t}(z)`: normalized mean of `u` over the disk `|w - z| <= t`.
pub fn disk_mean<F: Field + ?Sized>(u: &F, z: Complex64, t: f64, tol: f64) -> Result<Quadrature> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("disk radius must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(Quadrature::exact(u.eval(z)));
    }
    // (2/t²) ∫_0^t u^{⊙s}(z) s ds
    let cuts: Vec<f64> = u.singular_points().iter().map(|w| (w - z).norm()).collect();
    let inner_tol = tol / 4.0;
    let q = try_integrate(
        |s| Ok(circle_mean(u, z, s, inner_tol)?.value * s),
        0.0,
        t,
        &cuts,
        Tolerance::absolute(tol * t * t / 4.0),
    )?;
    Ok(q.scaled(2.0 / (t * t)).add(Quadrature {
        value: 0.0,
        error: inner_tol,
        evaluations: 0,
    }))
}

/// Radial bump `coefficient · (1 - s²)^power` on the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialKernel {
    pub coefficient: f64,
    pub power: u32,
}

impl RadialKernel {
    /// `(1 - s²)^power` normalized to unit mass.
    pub fn bump(power: u32) -> Self {
        // ∫_disk (1-|w|²)^k dλ = π / (k + 1)
        Self {
            coefficient: (power as f64 + 1.0) / PI,
            power,
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s >= 1.0 {
            0.0
        } else {
            self.coefficient * (1.0 - s * s).powi(self.power as i32)
        }
    }

    /// `∫ kernel(|w|) dλ(w)` by quadrature.
    pub fn mass(&self) -> Result<f64> {
        Ok(integrate(|s| TAU * s * self.eval(s), 0.0, 1.0, &[], Tolerance::absolute(1e-14))?.value)
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let mass = self.mass()?;
        if (mass - 1.0).abs() > tol {
            return Err(Error::InvalidKernel { mass });
        }
        Ok(())
    }
}

impl Default for RadialKernel {
    fn default() -> Self {
        Self::bump(3)
    }
}

/// `u^{⊛ř}(z) = ∫ u(z + ř w) kernel(|w|) dλ(w)`.
pub fn mollified_mean<F: Field + ?Sized>(
    u: &F,
    z: Complex64,
    r_check: f64,
    kernel: &RadialKernel,
    tol: f64,
) -> Result<Quadrature> {
    kernel.check_normalized(1e-9)?;
    if !(r_check >= 0.0) {
        return Err(Error::InvalidParameter(format!("mollifier radius must be >= 0, got {r_check}")));
    }
    if r_check == 0.0 {
        return Ok(Quadrature::exact(u.eval(z)));
    }
    let cuts: Vec<f64> = u
        .singular_points()
        .iter()
        .map(|w| (w - z).norm() / r_check)
        .collect();
    let inner_tol = tol / 4.0;
    let q = try_integrate(
        |s| Ok(TAU * s * kernel.eval(s) * circle_mean(u, z, r_check * s, inner_tol)?.value),
        0.0,
        1.0,
        &cuts,
        Tolerance::absolute(tol / 4.0),
    )?;
    Ok(q.add(Quadrature {
        value: 0.0,
        error: inner_tol,
        evaluations: 0,
    }))
}

/// Field `w ↦ u^{⊙r(w)}(w)`.
struct CircleMeanField<'a, F: ?Sized> {
    u: &'a F,
    rp: &'a RadiusProfile,
    tol: f64,
}

impl<F: Field + ?Sized> Field for CircleMeanField<'_, F> {
    fn eval(&self, w: Complex64) -> f64 {
        match circle_mean(self.u, w, self.rp.value(w), self.tol) {
            Ok(q) => q.value,
            Err(_) => f64::NAN,
        }
    }

    fn singular_points(&self) -> Vec<Complex64> {
        self.u.singular_points()
    }
}

/// Which inequality of the chain a slack refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainLink {
    /// `u <= u^{•r}`
    PointDisk,
    /// `u^{•r} <= u^{⊙r}`
    DiskCircle,
    /// `u^{⊙r} <= u^{•(√e r)}`
    CircleWideDisk,
    /// `(u^{⊙r})^{•r} <= u^{⊙r̂}`
    Enlargement,
}

pub const CHAIN_LINKS: [ChainLink; 4] = [
    ChainLink::PointDisk,
    ChainLink::DiskCircle,
    ChainLink::CircleWideDisk,
    ChainLink::Enlargement,
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanChainSample {
    pub re: f64,
    pub im: f64,
    pub r: f64,
    pub r_hat: Option<f64>,
    pub point: f64,
    pub disk: Option<f64>,
    pub circle: Option<f64>,
    pub wide_disk: Option<f64>,
    pub smoothed_disk: Option<f64>,
    pub hat_circle: Option<f64>,
    /// Reasons a link could not be evaluated at this sample.
    pub flags: Vec<String>,
}

impl MeanChainSample {
    /// `rhs - lhs` for a link, when both sides were evaluated.
    pub fn slack(&self, link: ChainLink) -> Option<f64> {
        let (lhs, rhs) = match link {
            ChainLink::PointDisk => (Some(self.point), self.disk),
            ChainLink::DiskCircle => (self.disk, self.circle),
            ChainLink::CircleWideDisk => (self.circle, self.wide_disk),
            ChainLink::Enlargement => (self.smoothed_disk, self.hat_circle),
        };
        let (lhs, rhs) = (lhs?, rhs?);
        if lhs == f64::NEG_INFINITY {
            return Some(f64::INFINITY);
        }
        Some(rhs - lhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkSummary {
    pub link: ChainLink,
    pub checked: usize,
    pub worst_slack: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanChainReport {
    pub tolerance: f64,
    pub samples: Vec<MeanChainSample>,
    pub links: Vec<LinkSummary>,
    pub flagged: usize,
}

impl MeanChainReport {
    pub fn holds(&self) -> bool {
        self.links.iter().all(|l| l.violations == 0)
    }

    pub fn link(&self, link: ChainLink) -> &LinkSummary {
        self.links.iter().find(|l| l.link == link).expect("every link is summarized")
    }
}

/// Evaluates the ordering `u <= u^{•r} <= u^{⊙r} <= u^{•(√e r)}` and the
/// enlargement inequality `(u^{⊙r})^{•r} <= u^{⊙r̂}` at every sample.
/// Samples where a link's precondition fails are flagged and that link is
/// skipped.
pub fn check_mean_chain<F: Field + ?Sized>(
    u: &F,
    rp: &RadiusProfile,
    samples: &[Complex64],
    tol: f64,
    exec: Execution,
) -> Result<MeanChainReport> {
    rp.validate()?;
    let quad_tol = tol / 8.0;
    let rows = exec.map(samples, |&z| chain_sample(u, rp, z, quad_tol));

    let mut links = Vec::new();
    for link in CHAIN_LINKS {
        let slacks: Vec<f64> = rows.iter().filter_map(|s| s.slack(link)).collect();
        links.push(LinkSummary {
            link,
            checked: slacks.len(),
            worst_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
            violations: slacks.iter().filter(|&&s| !(s >= -tol)).count(),
        });
    }
    let flagged = rows.iter().filter(|s| !s.flags.is_empty()).count();
    Ok(MeanChainReport {
        tolerance: tol,
        samples: rows,
        links,
        flagged,
    })
}

fn chain_sample<F: Field + ?Sized>(u: &F, rp: &RadiusProfile, z: Complex64, tol: f64) -> MeanChainSample {
    let mut row = MeanChainSample {
        re: z.re,
        im: z.im,
        r: f64::NAN,
        r_hat: None,
        point: u.eval(z),
        disk: None,
        circle: None,
        wide_disk: None,
        smoothed_disk: None,
        hat_circle: None,
        flags: Vec::new(),
    };
    let r = match radius(rp, z) {
        Ok(r) => r,
        Err(e) => {
            row.flags.push(e.to_string());
            return row;
        }
    };
    row.r = r;
    let record = |slot: &mut Option<f64>, flags: &mut Vec<String>, what: &str, q: Result<Quadrature>| match q {
        Ok(q) => *slot = Some(q.value),
        Err(e) => flags.push(format!("{what}: {e}")),
    };
    record(&mut row.disk, &mut row.flags, "disk mean", disk_mean(u, z, r, tol));
    record(&mut row.circle, &mut row.flags, "circle mean", circle_mean(u, z, r, tol));

    let wide = std::f64::consts::E.sqrt() * r;
    if wide < rp.boundary_distance(z) {
        record(&mut row.wide_disk, &mut row.flags, "wide disk mean", disk_mean(u, z, wide, tol));
    } else {
        row.flags.push("sqrt(e) r(z) reaches the boundary".into());
    }

    match hat_radius(rp, z) {
        Ok(r_hat) => {
            row.r_hat = Some(r_hat);
            let inner = CircleMeanField { u, rp, tol: tol / 4.0 };
            let smoothed = disk_mean(&inner, z, r, tol).and_then(|q| {
                if q.value.is_nan() {
                    Err(Error::Tolerance {
                        estimate: f64::NAN,
                        residual: f64::INFINITY,
                    })
                } else {
                    Ok(q)
                }
            });
            record(&mut row.smoothed_disk, &mut row.flags, "smoothed disk mean", smoothed);
            record(&mut row.hat_circle, &mut row.flags, "enlarged circle mean", circle_mean(u, z, r_hat, tol));
        }
        Err(e) => row.flags.push(format!("enlargement: {e}")),
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::WithSingularities;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn radius_examples() {
        let p1 = RadiusProfile::plane_power(1.0).unwrap();
        assert_eq!(radius(&p1, c(0.0, 0.0)).unwrap(), 1.0);
        assert_eq!(radius(&p1, c(3.0, 0.0)).unwrap(), 0.25);
        let d = RadiusProfile::disk_fraction(0.5, 2.0).unwrap();
        assert_eq!(radius(&d, c(1.0, 0.0)).unwrap(), 0.5);
        assert!(matches!(radius(&d, c(2.5, 0.0)), Err(Error::OutOfDomain(_))));
        assert!(RadiusProfile::disk_fraction(1.0, 2.0).is_err());
        assert!(RadiusProfile::plane_power(-1.0).is_err());
    }

    #[test]
    fn hat_radius_examples() {
        let p0 = RadiusProfile::plane_power(0.0).unwrap();
        for z in [c(0.0, 0.0), c(3.0, -4.0)] {
            assert_eq!(hat_radius(&p0, z).unwrap(), 2.0);
        }
        let p1 = RadiusProfile::plane_power(1.0).unwrap();
        assert!((hat_radius(&p1, c(0.0, 0.0)).unwrap() - 1.5).abs() < 1e-12);
        let h = hat_radius_certified(&p1, c(3.0, 0.0)).unwrap();
        assert!((h.value - (0.25 + 1.0 / 3.75)).abs() < 1e-12, "{h:?}");
        assert!(h.upper_bound >= h.value);
    }

    #[test]
    fn hat_radius_precondition_in_disk() {
        let d = RadiusProfile::disk_fraction(0.6, 1.0).unwrap();
        assert!(matches!(hat_radius(&d, c(0.5, 0.0)), Err(Error::Precondition(_))));
        let d = RadiusProfile::disk_fraction(0.2, 1.0).unwrap();
        assert!(hat_radius(&d, c(0.5, 0.0)).is_ok());
    }

    #[test]
    fn mean_examples() {
        let harmonic = |w: Complex64| (w * w).re;
        let z = c(0.7, -0.2);
        assert!((circle_mean(&harmonic, z, 1.3, 1e-12).unwrap().value - harmonic(z)).abs() < 1e-11);
        assert!((disk_mean(&harmonic, z, 1.3, 1e-11).unwrap().value - harmonic(z)).abs() < 1e-10);

        let log = WithSingularities::new(|w: Complex64| w.norm().ln(), vec![c(0.0, 0.0)]);
        assert!((circle_mean(&log, c(0.0, 0.0), 2.0, 1e-12).unwrap().value - 2f64.ln()).abs() < 1e-11);
        assert!((disk_mean(&log, c(0.0, 0.0), 1.0, 1e-10).unwrap().value + 0.5).abs() < 1e-9);

        let sq = |w: Complex64| w.norm_sqr();
        assert!((circle_mean(&sq, c(1.0, 0.0), 1.0, 1e-12).unwrap().value - 2.0).abs() < 1e-12);
        assert!((disk_mean(&sq, c(0.0, 0.0), 1.0, 1e-12).unwrap().value - 0.5).abs() < 1e-11);
    }

    #[test]
    fn kernel_normalization() {
        let k = RadialKernel::default();
        assert!((k.mass().unwrap() - 1.0).abs() < 1e-13);
        let bad = RadialKernel {
            coefficient: 1.0,
            power: 3,
        };
        let sq = |w: Complex64| w.norm_sqr();
        assert!(matches!(
            mollified_mean(&sq, c(0.0, 0.0), 1.0, &bad, 1e-10),
            Err(Error::InvalidKernel { .. })
        ));
        let v = mollified_mean(&|_: Complex64| 2.5, c(1.0, 1.0), 0.3, &k, 1e-12).unwrap();
        assert!((v.value - 2.5).abs() < 1e-11);
    }

    #[test]
    fn mean_chain_strict_for_abs() {
        let u = |w: Complex64| w.norm();
        let rp = RadiusProfile::plane_power(0.0).unwrap();
        let report = check_mean_chain(&u, &rp, &[c(0.0, 0.0)], 1e-9, Execution::Sequential).unwrap();
        let s = &report.samples[0];
        assert!((s.disk.unwrap() - 2.0 / 3.0).abs() < 1e-9);
        assert!((s.circle.unwrap() - 1.0).abs() < 1e-9);
        assert!((s.wide_disk.unwrap() - 2.0 * std::f64::consts::E.sqrt() / 3.0).abs() < 1e-9);
        for link in CHAIN_LINKS {
            assert!(report.link(link).worst_slack > 1e-3, "{link:?}");
        }
    }
}
