//! Point distributions, counting functions and signed Riesz charges.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::arc_mean;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{complex_json, Region};
use crate::quadrature::{try_integrate, Quadrature, Tolerance};

/// An extended real value. `±∞` never travels as a float sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extended {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl Extended {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Extended::PosInfinity
        } else if x == f64::NEG_INFINITY {
            Extended::NegInfinity
        } else {
            Extended::Finite(x)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::NegInfinity => f64::NEG_INFINITY,
            Extended::Finite(x) => x,
            Extended::PosInfinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInfinity => write!(f, "-inf"),
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::PosInfinity => write!(f, "+inf"),
        }
    }
}

/// Value of a counting measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Count {
    Finite(u64),
    Infinite,
}

/// A point with its multiplicity, `{"re":..,"im":..,"mult":..}` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    #[serde(default = "one")]
    pub mult: u32,
}

fn one() -> u32 {
    1
}

impl WeightedPoint {
    pub fn new(z: Complex64, mult: u32) -> Self {
        Self {
            re: z.re,
            im: z.im,
            mult,
        }
    }

    pub fn location(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Constructive description of an infinite (or large) point pattern. Each
/// generator enumerates its points inside any disk `|z| <= R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Generator {
    /// `step * k` for `k ∈ ℤ∖0`, `|k| <= max_index`.
    Line {
        #[serde(with = "complex_json")]
        step: Complex64,
        #[serde(default)]
        max_index: Option<u64>,
    },
    /// `spacing * (m + i n) ≠ 0` with modulus at most `max_radius`.
    GaussianLattice {
        #[serde(default = "unit")]
        spacing: f64,
        #[serde(default)]
        max_radius: Option<f64>,
    },
    /// `k`-th point at radius `(k / density)^(1/exponent)` on a golden-angle
    /// spiral, so `n(r) = ⌊density · r^exponent⌋`.
    RadialRule {
        density: f64,
        exponent: f64,
        #[serde(default)]
        max_radius: Option<f64>,
    },
}

fn unit() -> f64 {
    1.0
}

impl Generator {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Generator::Line { step, .. } => step.norm() > 0.0 && step.norm().is_finite(),
            Generator::GaussianLattice { spacing, max_radius } => {
                spacing > 0.0 && spacing.is_finite() && max_radius.map_or(true, |r| r >= 0.0)
            }
            Generator::RadialRule {
                density,
                exponent,
                max_radius,
            } => density > 0.0 && exponent > 0.0 && max_radius.map_or(true, |r| r >= 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid generator {self:?}")))
        }
    }

    /// Radius beyond which the generator has no points, if any.
    pub fn extent(&self) -> Option<f64> {
        match *self {
            Generator::Line { step, max_index } => max_index.map(|k| k as f64 * step.norm()),
            Generator::GaussianLattice { max_radius, .. } | Generator::RadialRule { max_radius, .. } => max_radius,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.extent().is_some()
    }

    /// Exponent λ with `n(r) ~ r^λ`.
    pub fn density_exponent(&self) -> f64 {
        match *self {
            Generator::Line { .. } => 1.0,
            Generator::GaussianLattice { .. } => 2.0,
            Generator::RadialRule { exponent, .. } => exponent,
        }
    }

    /// Leading constant `A` in `n(r) ≈ A r^λ`.
    pub fn density_constant(&self) -> f64 {
        match *self {
            Generator::Line { step, .. } => 2.0 / step.norm(),
            Generator::GaussianLattice { spacing, .. } => PI / (spacing * spacing),
            Generator::RadialRule { density, .. } => density,
        }
    }

    pub fn points_within(&self, radius: f64) -> Vec<Complex64> {
        let r = self.extent().map_or(radius, |e| e.min(radius));
        if r <= 0.0 {
            return Vec::new();
        }
        match *self {
            Generator::Line { step, .. } => {
                let kmax = (r / step.norm()).floor() as i64;
                let mut out = Vec::with_capacity(2 * kmax.max(0) as usize);
                for k in 1..=kmax {
                    let z = step * k as f64;
                    if z.norm() <= r {
                        out.push(z);
                        out.push(-z);
                    }
                }
                out
            }
            Generator::GaussianLattice { spacing, .. } => {
                let m = (r / spacing).floor() as i64;
                let mut out = Vec::new();
                for a in -m..=m {
                    for b in -m..=m {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        let z = Complex64::new(a as f64, b as f64) * spacing;
                        if z.norm() <= r {
                            out.push(z);
                        }
                    }
                }
                out
            }
            Generator::RadialRule { density, exponent, .. } => {
                let n = (density * r.powf(exponent)).floor() as u64;
                (1..=n)
                    .map(|k| {
                        let rho = (k as f64 / density).powf(1.0 / exponent);
                        Complex64::from_polar(rho, k as f64 * GOLDEN_ANGLE)
                    })
                    .filter(|z| z.norm() <= r)
                    .collect()
            }
        }
    }
}

/// Locally finite indexed multiset of points: explicit points plus an optional
/// generator.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ZeroDistribution {
    #[serde(default)]
    points: Vec<WeightedPoint>,
    #[serde(default)]
    generator: Option<Generator>,
}

impl ZeroDistribution {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_points(points: impl IntoIterator<Item = (Complex64, u32)>) -> Result<Self> {
        let z = Self {
            points: points.into_iter().map(|(p, m)| WeightedPoint::new(p, m)).collect(),
            generator: None,
        };
        z.validate()?;
        Ok(z)
    }

    pub fn from_generator(generator: Generator) -> Result<Self> {
        let z = Self {
            points: Vec::new(),
            generator: Some(generator),
        };
        z.validate()?;
        Ok(z)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.points.iter().find(|p| p.mult == 0 || !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "points need finite coordinates and multiplicity >= 1, got {p:?}"
            )));
        }
        if let Some(g) = &self.generator {
            g.validate()?;
        }
        Ok(())
    }

    pub fn explicit_points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.generator.as_ref().map_or(true, Generator::is_finite)
    }

    /// Radius of the smallest origin-centred disk containing every point.
    pub fn extent(&self) -> Option<f64> {
        let explicit = self.points.iter().map(|p| p.location().norm()).fold(0.0, f64::max);
        match &self.generator {
            None => Some(explicit),
            Some(g) => g.extent().map(|e| e.max(explicit)),
        }
    }

    pub fn contains_origin(&self) -> bool {
        // Generators never produce the origin.
        self.points.iter().any(|p| p.re == 0.0 && p.im == 0.0)
    }

    /// Every point with `|z| <= radius`, with multiplicity.
    pub fn points_within(&self, radius: f64) -> Vec<(Complex64, u32)> {
        let mut out: Vec<(Complex64, u32)> = self
            .points
            .iter()
            .filter(|p| p.location().norm() <= radius)
            .map(|p| (p.location(), p.mult))
            .collect();
        if let Some(g) = &self.generator {
            out.extend(g.points_within(radius).into_iter().map(|z| (z, 1)));
        }
        out
    }

    /// The `k` points of smallest modulus (ties broken by argument), or all
    /// points when fewer exist. Multiplicities count towards `k`.
    pub fn nearest(&self, k: usize) -> Vec<(Complex64, u32)> {
        let mut radius = 1.0f64;
        let mut pts = loop {
            let pts = self.points_within(radius);
            let total: u64 = pts.iter().map(|p| p.1 as u64).sum();
            let exhausted = self.extent().is_some_and(|e| radius >= e);
            if total as usize >= k || exhausted {
                break pts;
            }
            radius *= 2.0;
        };
        pts.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()).then(a.0.arg().total_cmp(&b.0.arg())));
        let mut out = Vec::new();
        let mut taken = 0usize;
        for (z, m) in pts {
            if taken >= k {
                break;
            }
            let m = (m as usize).min(k - taken);
            out.push((z, m as u32));
            taken += m;
        }
        out
    }

    /// Counting function normalized to a sorted map; only valid for finite
    /// distributions.
    fn normalized(&self) -> Option<BTreeMap<(u64, u64), u64>> {
        let extent = self.extent()?;
        let mut map = BTreeMap::new();
        for (z, m) in self.points_within(extent) {
            *map.entry((canonical_bits(z.re), canonical_bits(z.im))).or_insert(0) += m as u64;
        }
        Some(map)
    }
}

fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

impl PartialEq for ZeroDistribution {
    /// Equality of counting functions. Infinite distributions compare by
    /// generator and explicit part.
    fn eq(&self, other: &Self) -> bool {
        match (self.normalized(), other.normalized()) {
            (Some(a), Some(b)) => a == b,
            (None, None) => {
                let strip = |z: &ZeroDistribution| ZeroDistribution {
                    points: z.points.clone(),
                    generator: None,
                };
                self.generator == other.generator && strip(self).normalized() == strip(other).normalized()
            }
            _ => false,
        }
    }
}

/// `n_Z(S)`: total multiplicity of the points of `Z` in `S`.
pub fn counting_measure(z: &ZeroDistribution, region: &Region) -> Result<Count> {
    region.validate()?;
    let reach = match region.reach() {
        Some(r) => r,
        None => match z.extent() {
            Some(e) => e,
            // An infinite generator has infinitely many points outside every disk.
            None => return Ok(Count::Infinite),
        },
    };
    let total = z
        .points_within(reach)
        .into_iter()
        .filter(|(p, _)| region.contains(*p))
        .map(|(_, m)| m as u64)
        .sum();
    Ok(Count::Finite(total))
}

/// `N(t) = Σ_{0<|z_j|<=t} mult_j ln(t/|z_j|)`.
pub fn nevanlinna_n(z: &ZeroDistribution, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if z.contains_origin() {
        return Err(Error::PoleAtOrigin);
    }
    let mut terms: Vec<f64> = z
        .points_within(t)
        .into_iter()
        .map(|(p, m)| m as f64 * (t / p.norm()).ln())
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum())
}

/// Radial profile `φ` of a subharmonic function `u(z) = φ(ln |z|)`.
pub trait LogRadialProfile: Send + Sync + fmt::Debug {
    fn value(&self, s: f64) -> f64;
    fn slope(&self, s: f64) -> f64;
    fn curvature(&self, s: f64) -> f64;
}

/// Radial Riesz density, expressed as mass per unit radius: the charge of the
/// annulus `a < |z| <= b` is `∫_a^b density(s) ds`.
#[derive(Debug, Clone)]
pub enum RadialDensity {
    /// `coefficient · s^exponent`.
    Power { coefficient: f64, exponent: f64 },
    /// `coefficient · 4s / (1 + s²)²`, the charge of `coefficient · ln(1+|z|²)`.
    LogOnePlusSquare { coefficient: f64 },
    /// `φ''(ln s) / s` for `u = φ(ln |z|)`.
    Profile(Arc<dyn LogRadialProfile>),
}

impl RadialDensity {
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            RadialDensity::Power { coefficient, exponent } => coefficient * s.powf(*exponent),
            RadialDensity::LogOnePlusSquare { coefficient } => {
                let q = 1.0 + s * s;
                coefficient * 4.0 * s / (q * q)
            }
            RadialDensity::Profile(p) => p.curvature(s.ln()) / s,
        }
    }

    fn describe(&self) -> RadialRecord {
        match self {
            RadialDensity::Power { coefficient, exponent } => RadialRecord::Power {
                coefficient: *coefficient,
                exponent: *exponent,
            },
            RadialDensity::LogOnePlusSquare { coefficient } => RadialRecord::LogOnePlusSquare {
                coefficient: *coefficient,
            },
            RadialDensity::Profile(p) => RadialRecord::Profile {
                description: format!("{p:?}"),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadialPart {
    pub density: RadialDensity,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variation {
    Signed,
    Upper,
    Lower,
}

/// Point mass of a charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "complex_json")]
    pub location: Complex64,
    pub mass: f64,
}

/// Signed measure made of finitely many atoms plus origin-centred radial
/// densities. `upper()` and `lower()` return the Jordan parts.
#[derive(Debug, Clone)]
pub struct RieszCharge {
    atoms: Vec<Atom>,
    radial: Vec<RadialPart>,
    variation: Variation,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum RadialRecord {
    Power { coefficient: f64, exponent: f64 },
    LogOnePlusSquare { coefficient: f64 },
    Profile { description: String },
}

/// Serializable summary of a charge.
#[derive(Debug, Clone, Serialize)]
pub struct ChargeRecord {
    atoms: Vec<Atom>,
    radial: Vec<(f64, RadialRecord)>,
    variation: Variation,
}

impl RieszCharge {
    pub fn zero() -> Self {
        Self {
            atoms: Vec::new(),
            radial: Vec::new(),
            variation: Variation::Signed,
        }
    }

    pub fn dirac(at: Complex64) -> Self {
        Self::from_atoms(vec![Atom {
            location: at,
            mass: 1.0,
        }])
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        Self {
            atoms,
            ..Self::zero()
        }
    }

    pub fn radial(density: RadialDensity) -> Self {
        Self {
            radial: vec![RadialPart { density, weight: 1.0 }],
            ..Self::zero()
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn radial_parts(&self) -> &[RadialPart] {
        &self.radial
    }

    pub fn variation(&self) -> Variation {
        self.variation
    }

    pub fn record(&self) -> ChargeRecord {
        ChargeRecord {
            atoms: self.atoms.clone(),
            radial: self.radial.iter().map(|p| (p.weight, p.density.describe())).collect(),
            variation: self.variation,
        }
    }

    fn signed_parts(&self) -> (Vec<Atom>, Vec<RadialPart>) {
        assert_eq!(self.variation, Variation::Signed, "combine signed charges only");
        (self.atoms.clone(), self.radial.clone())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let (mut atoms, mut radial) = self.signed_parts();
        atoms.iter_mut().for_each(|a| a.mass *= factor);
        radial.iter_mut().for_each(|p| p.weight *= factor);
        Self {
            atoms,
            radial,
            variation: Variation::Signed,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let (mut atoms, mut radial) = self.signed_parts();
        let (a2, r2) = other.signed_parts();
        atoms.extend(a2);
        radial.extend(r2);
        Self {
            atoms,
            radial,
            variation: Variation::Signed,
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    /// Atoms merged by location, with zero masses dropped.
    fn netted_atoms(&self) -> Vec<Atom> {
        let mut map: BTreeMap<(u64, u64), (Complex64, f64)> = BTreeMap::new();
        for a in &self.atoms {
            let key = (canonical_bits(a.location.re), canonical_bits(a.location.im));
            map.entry(key).or_insert((a.location, 0.0)).1 += a.mass;
        }
        map.into_values()
            .filter(|(_, m)| *m != 0.0)
            .map(|(location, mass)| Atom { location, mass })
            .collect()
    }

    /// Upper variation `Δ⁺`.
    pub fn upper(&self) -> Self {
        self.jordan(Variation::Upper)
    }

    /// Lower variation `Δ⁻`.
    pub fn lower(&self) -> Self {
        self.jordan(Variation::Lower)
    }

    /// Total variation `|Δ| = Δ⁺ + Δ⁻`, as a pair of positive charges.
    pub fn total_variation(&self) -> (Self, Self) {
        (self.upper(), self.lower())
    }

    fn jordan(&self, which: Variation) -> Self {
        let (atoms, radial) = self.signed_parts();
        let sign = if which == Variation::Upper { 1.0 } else { -1.0 };
        let netted = Self {
            atoms,
            radial: radial.clone(),
            variation: Variation::Signed,
        }
        .netted_atoms();
        Self {
            atoms: netted
                .into_iter()
                .filter(|a| sign * a.mass > 0.0)
                .map(|a| Atom {
                    location: a.location,
                    mass: sign * a.mass,
                })
                .collect(),
            radial,
            variation: which,
        }
    }

    /// Radial density (mass per unit radius) after Jordan clamping.
    pub fn radial_density(&self, s: f64) -> f64 {
        let net: f64 = self.radial.iter().map(|p| p.weight * p.density.eval(s)).sum();
        match self.variation {
            Variation::Signed => net,
            Variation::Upper => net.max(0.0),
            Variation::Lower => (-net).max(0.0),
        }
    }

    pub fn has_radial_part(&self) -> bool {
        self.radial.iter().any(|p| p.weight != 0.0)
    }

    /// Charge of a bounded region: atoms inside plus a radial quadrature of the
    /// density weighted by the fraction of each circle `|z| = s` in the region.
    pub fn on_region(&self, region: &Region, tol: f64) -> Result<Quadrature> {
        region.validate()?;
        let reach = region.reach().ok_or(Error::UnboundedRegion)?;
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| region.contains(a.location))
            .map(|a| a.mass)
            .sum();
        if !self.has_radial_part() {
            return Ok(Quadrature::exact(atoms));
        }
        let origin = Complex64::new(0.0, 0.0);
        let lo = match *region {
            Region::Disk { center, radius } => (center.norm() - radius).max(0.0),
            Region::Annulus { center, outer, .. } => (center.norm() - outer).max(0.0),
            _ => 0.0,
        };
        let cuts = region.critical_radii();
        let q = self.integrate_radial(
            |s| {
                let frac = region.arcs_on_circle(origin, s).measure() / TAU;
                Ok(if frac == 0.0 { 0.0 } else { self.radial_density(s) * frac })
            },
            lo,
            reach,
            &cuts,
            tol,
        )?;
        Ok(Quadrature {
            value: q.value + atoms,
            ..q
        })
    }

    /// `∫_region f dΔ` for a field `f`. The radial part integrates circle means
    /// of `f` restricted to the region; a non-finite atom term yields a
    /// non-finite value.
    pub fn integrate_field<F: Field + ?Sized>(&self, f: &F, region: &Region, tol: f64) -> Result<Quadrature> {
        self.integrate_field_from(f, region, 0.0, tol)
    }

    /// As [`integrate_field`](Self::integrate_field), with the radial part
    /// restricted to `|z| >= inner` (atoms are not affected).
    pub fn integrate_field_from<F: Field + ?Sized>(
        &self,
        f: &F,
        region: &Region,
        inner: f64,
        tol: f64,
    ) -> Result<Quadrature> {
        region.validate()?;
        let reach = region.reach().ok_or(Error::UnboundedRegion)?;
        let atoms = self
            .atoms
            .iter()
            .filter(|a| region.contains(a.location))
            .fold(0.0, |acc, a| acc + a.mass * f.eval(a.location));
        if !self.has_radial_part() || inner >= reach {
            return Ok(Quadrature::exact(atoms));
        }
        let origin = Complex64::new(0.0, 0.0);
        let mut cuts = region.critical_radii();
        cuts.extend(f.singular_points().iter().map(|w| w.norm()));
        if let Some(c) = f.radial_center() {
            cuts.push(c.norm());
        }
        let inner_tol = 0.1 * tol / self.mass_scale(inner, reach).max(1.0);
        let q = self.integrate_radial(
            |s| {
                let density = self.radial_density(s);
                if density == 0.0 {
                    return Ok(0.0);
                }
                let arcs = region.arcs_on_circle(origin, s);
                Ok(density * arc_mean(f, origin, s, &arcs, inner_tol)?.value)
            },
            inner,
            reach,
            &cuts,
            tol,
        )?;
        Ok(Quadrature {
            value: q.value + atoms,
            ..q
        })
    }

    /// `∫_a^b g(s) ds`. A power density `s^e` with `-1 < e < 0` is integrable
    /// but defeats plain quadrature near 0, so there `s = x^m` with
    /// `m = 1/(1 + e)` makes the integrand bounded.
    fn integrate_radial<G: FnMut(f64) -> Result<f64>>(
        &self,
        mut g: G,
        a: f64,
        b: f64,
        cuts: &[f64],
        tol: f64,
    ) -> Result<Quadrature> {
        let worst = self
            .radial
            .iter()
            .filter(|p| p.weight != 0.0)
            .filter_map(|p| match p.density {
                RadialDensity::Power { exponent, .. } if exponent < 0.0 => Some(exponent),
                _ => None,
            })
            .fold(0.0, f64::min);
        if worst >= 0.0 || a > 0.0 {
            return try_integrate(g, a, b, cuts, Tolerance::absolute(tol));
        }
        let m = 1.0 / (1.0 + worst);
        let cuts: Vec<f64> = cuts.iter().filter(|c| **c > 0.0).map(|c| c.powf(1.0 / m)).collect();
        try_integrate(
            |x| {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                Ok(g(x.powf(m))? * m * x.powf(m - 1.0))
            },
            0.0,
            b.powf(1.0 / m),
            &cuts,
            Tolerance::absolute(tol),
        )
    }

    /// Rough total variation of the radial part on `[a, b]`.
    fn mass_scale(&self, a: f64, b: f64) -> f64 {
        let n = 64;
        let h = (b - a) / n as f64;
        (0..n)
            .map(|k| {
                let s = a + (k as f64 + 0.5) * h;
                self.radial.iter().map(|p| (p.weight * p.density.eval(s)).abs()).sum::<f64>() * h
            })
            .sum()
    }
}

/// Charge of a region, `charge_on_region(c, S)`.
pub fn charge_on_region(charge: &RieszCharge, region: &Region, tol: f64) -> Result<Quadrature> {
    charge.on_region(region, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pi_line() -> ZeroDistribution {
        ZeroDistribution::from_generator(Generator::Line {
            step: c(PI, 0.0),
            max_index: None,
        })
        .unwrap()
    }

    #[test]
    fn counting_examples() {
        let d = Region::disk(c(0.0, 0.0), 1.0).unwrap();
        assert_eq!(counting_measure(&ZeroDistribution::empty(), &d).unwrap(), Count::Finite(0));
        let d10 = Region::disk(c(0.0, 0.0), 10.0).unwrap();
        assert_eq!(counting_measure(&pi_line(), &d10).unwrap(), Count::Finite(6));
        let triple = ZeroDistribution::from_points([(c(1.0, 0.0), 3)]).unwrap();
        let d2 = Region::disk(c(0.0, 0.0), 2.0).unwrap();
        assert_eq!(counting_measure(&triple, &d2).unwrap(), Count::Finite(3));
    }

    #[test]
    fn unbounded_regions() {
        assert_eq!(counting_measure(&pi_line(), &Region::WholePlane).unwrap(), Count::Infinite);
        let triple = ZeroDistribution::from_points([(c(1.0, 0.0), 3), (c(5.0, 1.0), 1)]).unwrap();
        let outside = Region::ComplementOfDisk {
            center: c(0.0, 0.0),
            radius: 2.0,
        };
        assert_eq!(counting_measure(&triple, &outside).unwrap(), Count::Finite(1));
    }

    #[test]
    fn zero_multiplicity_rejected() {
        assert!(ZeroDistribution::from_points([(c(1.0, 0.0), 0)]).is_err());
    }

    #[test]
    fn nevanlinna_examples() {
        let one = ZeroDistribution::from_points([(c(1.0, 0.0), 1)]).unwrap();
        assert!((nevanlinna_n(&one, std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(nevanlinna_n(&ZeroDistribution::empty(), 3.0).unwrap(), 0.0);
        let expected = 2.0 * ((10.0 / PI).ln() + (10.0 / (2.0 * PI)).ln() + (10.0 / (3.0 * PI)).ln());
        let n = nevanlinna_n(&pi_line(), 10.0).unwrap();
        assert!((n - expected).abs() < 1e-13);
        assert!((n - 3.364).abs() < 1e-3);
        let origin = ZeroDistribution::from_points([(c(0.0, 0.0), 1)]).unwrap();
        assert_eq!(nevanlinna_n(&origin, 1.0), Err(Error::PoleAtOrigin));
    }

    #[test]
    fn equality_is_counting_function_equality() {
        let a = ZeroDistribution::from_points([(c(1.0, 0.0), 2), (c(0.0, 1.0), 1)]).unwrap();
        let b = ZeroDistribution::from_points([(c(0.0, 1.0), 1), (c(1.0, 0.0), 1), (c(1.0, 0.0), 1)]).unwrap();
        assert_eq!(a, b);
        let line = ZeroDistribution::from_generator(Generator::Line {
            step: c(1.0, 0.0),
            max_index: Some(2),
        })
        .unwrap();
        let explicit =
            ZeroDistribution::from_points([(c(1.0, 0.0), 1), (c(-1.0, 0.0), 1), (c(2.0, 0.0), 1), (c(-2.0, 0.0), 1)])
                .unwrap();
        assert_eq!(line, explicit);
        assert_ne!(a, explicit);
    }

    #[test]
    fn nearest_respects_multiplicity() {
        let z = ZeroDistribution::from_points([(c(3.0, 0.0), 1), (c(1.0, 0.0), 2), (c(2.0, 0.0), 1)]).unwrap();
        let n = z.nearest(3);
        assert_eq!(n, vec![(c(1.0, 0.0), 2), (c(2.0, 0.0), 1)]);
        assert_eq!(pi_line().nearest(4).len(), 4);
    }

    #[test]
    fn atom_charge_and_jordan_parts() {
        let charge = RieszCharge::dirac(c(0.0, 0.0));
        let d = Region::disk(c(0.0, 0.0), 1.0).unwrap();
        assert_eq!(charge.on_region(&d, 1e-12).unwrap().value, 1.0);

        let up = RieszCharge::radial(RadialDensity::Power {
            coefficient: 1.0,
            exponent: 0.0,
        });
        let low = RieszCharge::radial(RadialDensity::Power {
            coefficient: 0.5,
            exponent: 1.0,
        })
        .plus(&RieszCharge::dirac(c(0.5, 0.0)));
        let signed = up.minus(&low);
        for t in [0.5, 1.0, 2.0, 3.0] {
            let r = Region::disk(c(0.0, 0.0), t).unwrap();
            let s = signed.on_region(&r, 1e-12).unwrap().value;
            let p = signed.upper().on_region(&r, 1e-12).unwrap().value;
            let n = signed.lower().on_region(&r, 1e-12).unwrap().value;
            assert!(p >= 0.0 && n >= 0.0);
            assert!((s - (p - n)).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn json_schema_points_and_generator() {
        let js = r#"{"points":[{"re":1.0,"im":-2.0,"mult":3}],"generator":{"kind":"line","step":{"re":3.0,"im":0.0},"max_index":5}}"#;
        let z: ZeroDistribution = serde_json::from_str(js).unwrap();
        z.validate().unwrap();
        assert_eq!(z.points_within(100.0).len(), 11);
        let back = serde_json::to_string(&z).unwrap();
        let z2: ZeroDistribution = serde_json::from_str(&back).unwrap();
        assert_eq!(z, z2);
    }
}
