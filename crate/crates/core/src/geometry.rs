//! Planar regions and their intersections with circles.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// JSON form `{"re": .., "im": ..}` for complex numbers.
pub mod complex_json {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        re: f64,
        #[serde(default)]
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Repr { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let r = Repr::deserialize(d)?;
        Ok(Complex64::new(r.re, r.im))
    }
}

/// Region of the plane. Disks are closed, annuli are `inner < |z-c| <= outer`
/// and complements are open, so disks and annuli with shared radii tile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    Disk {
        #[serde(with = "complex_json", default)]
        center: Complex64,
        radius: f64,
    },
    Annulus {
        #[serde(with = "complex_json", default)]
        center: Complex64,
        inner: f64,
        outer: f64,
    },
    ComplementOfDisk {
        #[serde(with = "complex_json", default)]
        center: Complex64,
        radius: f64,
    },
    WholePlane,
}

impl Region {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        let r = Region::Disk { center, radius };
        r.validate()?;
        Ok(r)
    }

    pub fn annulus(center: Complex64, inner: f64, outer: f64) -> Result<Self> {
        let r = Region::Annulus {
            center,
            inner,
            outer,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Region::Disk { radius, .. } | Region::ComplementOfDisk { radius, .. } => {
                radius >= 0.0 && radius.is_finite()
            }
            Region::Annulus { inner, outer, .. } => inner >= 0.0 && inner <= outer && outer.is_finite(),
            Region::WholePlane => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("region radii must be ordered and >= 0: {self:?}")))
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Disk { center, radius } => (z - center).norm() <= radius,
            Region::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = (z - center).norm();
                d > inner && d <= outer
            }
            Region::ComplementOfDisk { center, radius } => (z - center).norm() > radius,
            Region::WholePlane => true,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Region::Disk { .. } | Region::Annulus { .. })
    }

    /// Radius of the smallest origin-centred closed disk containing the region.
    pub fn reach(&self) -> Option<f64> {
        match *self {
            Region::Disk { center, radius } => Some(center.norm() + radius),
            Region::Annulus { center, outer, .. } => Some(center.norm() + outer),
            _ => None,
        }
    }

    /// Distances from the origin at which the circle `|z| = s` changes how it
    /// meets the region boundary.
    pub fn critical_radii(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut push = |c: Complex64, r: f64| {
            let d = c.norm();
            out.push((d - r).abs());
            out.push(d + r);
        };
        match *self {
            Region::Disk { center, radius } | Region::ComplementOfDisk { center, radius } => push(center, radius),
            Region::Annulus {
                center,
                inner,
                outer,
            } => {
                push(center, inner);
                push(center, outer);
            }
            Region::WholePlane => {}
        }
        out
    }

    /// Angles `θ` for which `origin + s e^{iθ}` lies in the region.
    pub fn arcs_on_circle(&self, origin: Complex64, s: f64) -> ArcSet {
        match *self {
            Region::Disk { center, radius } => ArcSet::within(origin, s, center, radius),
            Region::Annulus {
                center,
                inner,
                outer,
            } => ArcSet::within(origin, s, center, inner)
                .complement()
                .intersect(&ArcSet::within(origin, s, center, outer)),
            Region::ComplementOfDisk { center, radius } => ArcSet::within(origin, s, center, radius).complement(),
            Region::WholePlane => ArcSet::full(),
        }
    }
}

/// Sorted disjoint closed sub-intervals of `[0, 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    arcs: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn full() -> Self {
        Self {
            arcs: vec![(0.0, TAU)],
        }
    }

    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].0 <= 0.0 && self.arcs[0].1 >= TAU
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    /// Angles where `|origin + s e^{iθ} - center| <= radius`.
    pub fn within(origin: Complex64, s: f64, center: Complex64, radius: f64) -> Self {
        let offset = origin - center;
        let d = offset.norm();
        if s == 0.0 || d == 0.0 {
            let dist = if s == 0.0 { d } else { s };
            return if dist <= radius { Self::full() } else { Self::empty() };
        }
        // |offset + s e^{iθ}|^2 = d^2 + s^2 + 2 s d cos(θ - φ)
        let kappa = (radius * radius - d * d - s * s) / (2.0 * s * d);
        if kappa >= 1.0 {
            return Self::full();
        }
        if kappa < -1.0 {
            return Self::empty();
        }
        let phi = offset.arg();
        let alpha = kappa.acos();
        // Allowed: θ - φ in [alpha, 2π - alpha].
        Self::from_wrapped(phi + alpha, phi + TAU - alpha)
    }

    fn from_wrapped(start: f64, end: f64) -> Self {
        let len = end - start;
        if len >= TAU {
            return Self::full();
        }
        if len <= 0.0 {
            return Self::empty();
        }
        let a = start.rem_euclid(TAU);
        let b = a + len;
        let arcs = if b <= TAU {
            vec![(a, b)]
        } else {
            vec![(0.0, b - TAU), (a, TAU)]
        };
        Self { arcs }
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(a, b) in &self.arcs {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < TAU {
            out.push((cursor, TAU));
        }
        Self { arcs: out }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a0, a1) = self.arcs[i];
            let (b0, b1) = other.arcs[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { arcs: out }
    }
}

/// Angle `θ` in `[0, 2π)` of `w` seen from `center`.
pub fn angle_from(center: Complex64, w: Complex64) -> f64 {
    (w - center).arg().rem_euclid(TAU)
}
