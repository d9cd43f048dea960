//! Test-function families: plane potentials (`ln⁺(t|w|)` and its smoothed
//! variant), their inversions, Jensen potentials and disk test functions.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::jensen::JensenPotential;
use crate::means::{circle_mean, mollified_mean, RadialKernel};
use crate::measures::{Extended, LogRadialProfile};

/// Class a test function belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Positive subharmonic on the plane, `p(0) = 0`, `limsup p/ln|w| <= 1`.
    PlanePot01,
    /// Additionally vanishing near 0 and `ln|w| + O(1)` at infinity.
    PlaneSmoothP1,
    JensenPj,
    /// `0 <= v <= b` on `D \ S`, tending to 0 at the boundary.
    DiskV,
    /// Additionally vanishing near the boundary.
    DiskV00,
}

/// `φ(s)` with `φ = 0` for `s <= -ε`, `φ(s) = s` for `s >= ε`, and a convex
/// transition whose slope is the quintic smoothstep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CappedLogProfile {
    pub eps: f64,
}

impl CappedLogProfile {
    fn x(&self, s: f64) -> f64 {
        (s + self.eps) / (2.0 * self.eps)
    }
}

impl LogRadialProfile for CappedLogProfile {
    fn value(&self, s: f64) -> f64 {
        if s <= -self.eps {
            0.0
        } else if s >= self.eps {
            s
        } else {
            let x = self.x(s);
            2.0 * self.eps * x.powi(4) * (x * x - 3.0 * x + 2.5)
        }
    }

    fn slope(&self, s: f64) -> f64 {
        if s <= -self.eps {
            0.0
        } else if s >= self.eps {
            1.0
        } else {
            let x = self.x(s);
            x.powi(3) * (6.0 * x * x - 15.0 * x + 10.0)
        }
    }

    fn curvature(&self, s: f64) -> f64 {
        if s <= -self.eps || s >= self.eps {
            0.0
        } else {
            let x = self.x(s);
            30.0 * x * x * (1.0 - x) * (1.0 - x) / (2.0 * self.eps)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestKind {
    /// `ln⁺(t |w|)`.
    TruncatedLog { t: f64 },
    /// `φ(ln(t |w|))` with [`CappedLogProfile`].
    SmoothCappedLog { t: f64, eps: f64 },
    /// `b ln(R/|z|) / ln(R/s)` on `s <= |z| <= R`.
    AnnulusHarmonic { outer: f64, inner: f64, bound: f64 },
    /// `scale · max(0, v - edge)`, vanishing for `|z| >= cut`.
    Compactified {
        base: Box<TestPotential>,
        edge: f64,
        scale: f64,
        cut: f64,
    },
    Jensen(JensenPotential),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestPotential {
    pub kind: TestKind,
}

pub fn truncated_log_plane(t: f64) -> Result<TestPotential> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    Ok(TestPotential {
        kind: TestKind::TruncatedLog { t },
    })
}

pub fn smooth_capped_log(t: f64, eps: f64) -> Result<TestPotential> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("smoothing width must lie in (0, 1), got {eps}")));
    }
    Ok(TestPotential {
        kind: TestKind::SmoothCappedLog { t, eps },
    })
}

/// Test function for `D = disk(0, R)`, `S = closed disk(0, s)` with bound `b`.
pub fn annulus_harmonic_disk_test(outer: f64, inner: f64, bound: f64) -> Result<TestPotential> {
    if !(inner > 0.0 && inner < outer && outer.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < s < R, got s = {inner}, R = {outer}")));
    }
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::InvalidParameter(format!("bound must be positive, got {bound}")));
    }
    Ok(TestPotential {
        kind: TestKind::AnnulusHarmonic { outer, inner, bound },
    })
}

/// Replaces a disk test function by `scale · max(0, v - v_edge)`, `v_edge` the
/// value of `v` on the circle of radius `(1 - shrink) R`, rescaled so the
/// bound `b` is kept.
pub fn compactify_disk_test(v: &TestPotential, shrink: f64) -> Result<TestPotential> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidParameter(format!("shrink must lie in (0, 1), got {shrink}")));
    }
    let TestKind::AnnulusHarmonic { outer, inner, bound } = v.kind else {
        return Err(Error::InvalidParameter("compactification needs a disk test function".into()));
    };
    let cut = (1.0 - shrink) * outer;
    if cut <= inner {
        return Err(Error::InvalidParameter(format!(
            "collar at radius {cut} does not leave room outside S (radius {inner})"
        )));
    }
    let edge = v.eval(Complex64::new(cut, 0.0)).to_f64();
    Ok(TestPotential {
        kind: TestKind::Compactified {
            base: Box::new(v.clone()),
            edge,
            scale: bound / (bound - edge),
            cut,
        },
    })
}

pub fn jensen_test(v: JensenPotential) -> TestPotential {
    TestPotential {
        kind: TestKind::Jensen(v),
    }
}

impl TestPotential {
    pub fn regime(&self) -> Regime {
        match self.kind {
            TestKind::TruncatedLog { .. } => Regime::PlanePot01,
            TestKind::SmoothCappedLog { .. } => Regime::PlaneSmoothP1,
            TestKind::AnnulusHarmonic { .. } => Regime::DiskV,
            TestKind::Compactified { .. } => Regime::DiskV00,
            TestKind::Jensen(_) => Regime::JensenPj,
        }
    }

    pub fn is_plane(&self) -> bool {
        matches!(self.regime(), Regime::PlanePot01 | Regime::PlaneSmoothP1)
    }

    /// Upper bound `b` for disk regimes.
    pub fn bound(&self) -> Option<f64> {
        match &self.kind {
            TestKind::AnnulusHarmonic { bound, .. } => Some(*bound),
            TestKind::Compactified { base, .. } => base.bound(),
            _ => None,
        }
    }

    /// Value at distance `d` from the origin for the radial families.
    fn radial_value(&self, d: f64) -> f64 {
        match &self.kind {
            TestKind::TruncatedLog { t } => (t * d).ln().max(0.0),
            TestKind::SmoothCappedLog { t, eps } => CappedLogProfile { eps: *eps }.value((t * d).ln()),
            TestKind::AnnulusHarmonic { outer, inner, bound } => {
                if d >= *outer {
                    0.0
                } else if d <= *inner {
                    *bound
                } else {
                    bound * (outer / d).ln() / (outer / inner).ln()
                }
            }
            TestKind::Compactified { base, edge, scale, cut } => {
                if d >= *cut {
                    0.0
                } else {
                    scale * (base.radial_value(d) - edge).max(0.0)
                }
            }
            TestKind::Jensen(_) => unreachable!("Jensen potentials are centred at their pole"),
        }
    }

    pub fn eval(&self, w: Complex64) -> Extended {
        match &self.kind {
            TestKind::Jensen(v) => v.eval(w),
            _ => Extended::Finite(self.radial_value(w.norm())),
        }
    }

    /// For plane families, the radius beyond which the inverted potential
    /// `p(1/conj z)` vanishes.
    pub fn inverted_support(&self) -> Option<f64> {
        match self.kind {
            TestKind::TruncatedLog { t } => Some(t),
            TestKind::SmoothCappedLog { t, eps } => Some(t * eps.exp()),
            _ => None,
        }
    }
}

impl Field for TestPotential {
    fn eval(&self, z: Complex64) -> f64 {
        TestPotential::eval(self, z).to_f64()
    }

    fn singular_points(&self) -> Vec<Complex64> {
        match &self.kind {
            TestKind::Jensen(v) => vec![v.pole],
            _ => vec![Complex64::new(0.0, 0.0)],
        }
    }

    fn radial_center(&self) -> Option<Complex64> {
        match &self.kind {
            TestKind::Jensen(v) => Some(v.pole),
            _ => Some(Complex64::new(0.0, 0.0)),
        }
    }
}

/// `v(z) = p(1/conj z)` for a plane test function `p`, with a pole at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedPotential {
    pub base: TestPotential,
}

pub fn inversion_pullback(p: &TestPotential) -> Result<InvertedPotential> {
    if !p.is_plane() {
        return Err(Error::InvalidParameter(format!(
            "inversion needs a plane test function, got {:?}",
            p.regime()
        )));
    }
    Ok(InvertedPotential { base: p.clone() })
}

impl InvertedPotential {
    pub fn eval(&self, z: Complex64) -> Extended {
        if z.norm() == 0.0 {
            return Extended::PosInfinity;
        }
        self.base.eval(z.conj().inv())
    }

    /// Radius beyond which `v` vanishes.
    pub fn support(&self) -> f64 {
        self.base.inverted_support().expect("plane test function")
    }
}

impl Field for InvertedPotential {
    fn eval(&self, z: Complex64) -> f64 {
        InvertedPotential::eval(self, z).to_f64()
    }

    fn singular_points(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0)]
    }

    fn radial_center(&self) -> Option<Complex64> {
        Some(Complex64::new(0.0, 0.0))
    }
}

/// Optional smoothing pass: `w ↦ v^{⊛radius}(w)` with the default bump.
pub struct Mollified<'a> {
    pub base: &'a TestPotential,
    pub radius: f64,
    pub kernel: RadialKernel,
}

impl Field for Mollified<'_> {
    fn eval(&self, z: Complex64) -> f64 {
        mollified_mean(self.base, z, self.radius, &self.kernel, 1e-10)
            .map(|q| q.value)
            .unwrap_or(f64::NAN)
    }
}

/// Family of test functions indexed by `t` on a geometric grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    TruncatedLog {
        #[serde(default = "default_t_min")]
        t_min: f64,
        t_max: f64,
        #[serde(default = "default_ratio")]
        ratio: f64,
    },
    SmoothCappedLog {
        #[serde(default = "default_t_min")]
        t_min: f64,
        t_max: f64,
        #[serde(default = "default_ratio")]
        ratio: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
}

fn default_t_min() -> f64 {
    0.5
}

fn default_ratio() -> f64 {
    2f64.powf(0.25)
}

fn default_eps() -> f64 {
    0.1
}

impl FamilySpec {
    pub fn truncated_log(t_min: f64, t_max: f64) -> Self {
        FamilySpec::TruncatedLog {
            t_min,
            t_max,
            ratio: default_ratio(),
        }
    }

    pub fn t_min(&self) -> f64 {
        match *self {
            FamilySpec::TruncatedLog { t_min, .. } | FamilySpec::SmoothCappedLog { t_min, .. } => t_min,
        }
    }

    pub fn t_max(&self) -> f64 {
        match *self {
            FamilySpec::TruncatedLog { t_max, .. } | FamilySpec::SmoothCappedLog { t_max, .. } => t_max,
        }
    }

    pub fn with_t_max(mut self, value: f64) -> Self {
        match &mut self {
            FamilySpec::TruncatedLog { t_max, .. } | FamilySpec::SmoothCappedLog { t_max, .. } => *t_max = value,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (t_min, t_max, ratio) = match *self {
            FamilySpec::TruncatedLog { t_min, t_max, ratio } => (t_min, t_max, ratio),
            FamilySpec::SmoothCappedLog {
                t_min, t_max, ratio, eps,
            } => {
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
                }
                (t_min, t_max, ratio)
            }
        };
        if !(t_min > 0.0 && t_max >= t_min && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("need 0 < t_min <= t_max, got {t_min}, {t_max}")));
        }
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid ratio must exceed 1, got {ratio}")));
        }
        Ok(())
    }

    /// `t_min · ratio^k` up to `t_max`; `t_max` itself is always included.
    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let (t_min, t_max) = (self.t_min(), self.t_max());
        let ratio = match *self {
            FamilySpec::TruncatedLog { ratio, .. } | FamilySpec::SmoothCappedLog { ratio, .. } => ratio,
        };
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let t = t_min * ratio.powi(k);
            if t > t_max * (1.0 - 1e-12) {
                break;
            }
            out.push(t);
            k += 1;
        }
        out.push(t_max);
        Ok(out)
    }

    pub fn member(&self, t: f64) -> Result<TestPotential> {
        match *self {
            FamilySpec::TruncatedLog { .. } => truncated_log_plane(t),
            FamilySpec::SmoothCappedLog { eps, .. } => smooth_capped_log(t, eps),
        }
    }
}

/// One class-membership condition and whether it held.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> MembershipCheck {
    MembershipCheck { name, passed, detail }
}

/// Deterministic sample points on a golden-angle spiral inside `disk(0, reach)`.
fn spiral(n: usize, reach: f64) -> Vec<Complex64> {
    let golden = TAU * (1.0 - 1.0 / ((1.0 + 5f64.sqrt()) / 2.0));
    (0..n)
        .map(|k| {
            let r = reach * ((k as f64 + 0.5) / n as f64).sqrt();
            Complex64::from_polar(r, golden * k as f64)
        })
        .collect()
}

/// Sub-mean inequality at the given points and radii.
pub fn sub_mean_holds<F: Field + ?Sized>(f: &F, points: &[(Complex64, f64)], tol: f64) -> (bool, f64) {
    let mut worst = f64::INFINITY;
    for &(z, r) in points {
        let center = f.eval(z);
        if center == f64::NEG_INFINITY {
            continue;
        }
        match circle_mean(f, z, r, tol / 4.0) {
            Ok(q) => worst = worst.min(q.value - center),
            Err(_) => return (false, f64::NAN),
        }
    }
    (worst >= -tol, worst)
}

/// Runs the membership battery of the member's regime.
pub fn membership_checks(p: &TestPotential) -> Vec<MembershipCheck> {
    let mut out = Vec::new();
    let origin = Complex64::new(0.0, 0.0);
    let ladder: Vec<f64> = (0..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    match &p.kind {
        TestKind::TruncatedLog { t } | TestKind::SmoothCappedLog { t, .. } => {
            let t = *t;
            let v0 = p.eval(origin).to_f64();
            out.push(check("normalized at 0", v0 == 0.0, format!("p(0) = {v0}")));
            let pts = spiral(200, 10.0 / t);
            let min = pts.iter().map(|&w| p.eval(w).to_f64()).fold(f64::INFINITY, f64::min);
            out.push(check("positive", min >= 0.0, format!("min sampled value {min}")));
            let big: Vec<f64> = ladder.iter().map(|&r| r * (1.0 + 1.0 / t)).collect();
            let ratios: Vec<f64> = big
                .iter()
                .map(|&r| p.eval(Complex64::new(r, 0.0)).to_f64() / r.ln())
                .collect();
            // p/ln r is affine in 1/ln r on the ladder tail; extrapolate to r = ∞.
            let n = big.len();
            let (x0, x1) = (1.0 / big[n - 2].ln(), 1.0 / big[n - 1].ln());
            let limit = ratios[n - 1] - x1 * (ratios[n - 1] - ratios[n - 2]) / (x1 - x0);
            out.push(check(
                "unit log growth",
                limit <= 1.0 + 1e-9,
                format!("p/ln|w| extrapolates to {limit}"),
            ));
            let discs: Vec<_> = spiral(24, 4.0 / t).into_iter().map(|z| (z, 0.3 / t)).collect();
            let (ok, worst) = sub_mean_holds(p, &discs, 1e-9);
            out.push(check("sub-mean", ok, format!("worst slack {worst}")));
            if let TestKind::SmoothCappedLog { eps, .. } = p.kind {
                let inner = (-eps).exp() / t;
                let near: f64 = spiral(50, inner).iter().map(|&w| p.eval(w).to_f64()).fold(0.0, f64::max);
                out.push(check("vanishes near 0", near == 0.0, format!("max on disk(0, {inner}) = {near}")));
                let diffs: Vec<f64> = big
                    .iter()
                    .map(|&r| p.eval(Complex64::new(r, 0.0)).to_f64() - r.ln())
                    .collect();
                let spread = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                out.push(check(
                    "log plus bounded",
                    spread <= t.ln().abs() + eps + 1e-9,
                    format!("sup |p - ln|w|| on ladder {spread}"),
                ));
            }
        }
        TestKind::AnnulusHarmonic { outer, inner, bound } => disk_battery(p, *outer, *inner, *bound, None, &mut out),
        TestKind::Compactified { base, cut, .. } => {
            if let TestKind::AnnulusHarmonic { outer, inner, bound } = base.kind {
                disk_battery(p, outer, inner, bound, Some(*cut), &mut out);
            }
        }
        TestKind::Jensen(v) => {
            let support = v.support_radius().max(1e-3);
            let pts = spiral(200, 2.0 * support);
            let vals: Vec<(f64, f64)> = pts
                .iter()
                .map(|&w| ((w - v.pole).norm(), v.eval(v.pole + w).to_f64()))
                .collect();
            let min = vals.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
            out.push(check("positive", min >= 0.0, format!("min sampled value {min}")));
            let outside = vals
                .iter()
                .filter(|x| x.0 >= support)
                .map(|x| x.1.abs())
                .fold(0.0, f64::max);
            out.push(check("compact support", outside == 0.0, format!("max outside support {outside}")));
            let coef = v.pole_coefficient();
            out.push(check("pole coefficient", coef <= 1.0 + 1e-3, format!("estimated {coef}")));
        }
    }
    out
}

fn disk_battery(
    p: &TestPotential,
    outer: f64,
    inner: f64,
    bound: f64,
    cut: Option<f64>,
    out: &mut Vec<MembershipCheck>,
) {
    let pts: Vec<Complex64> = spiral(400, outer)
        .into_iter()
        .filter(|w| w.norm() > inner)
        .collect();
    let (lo, hi) = pts
        .iter()
        .map(|&w| p.eval(w).to_f64())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    out.push(check(
        "bounded by b",
        lo >= 0.0 && hi <= bound * (1.0 + 1e-12),
        format!("range [{lo}, {hi}] for b = {bound}"),
    ));
    let collar: Vec<f64> = (1..=6)
        .map(|k| p.eval(Complex64::new(outer * (1.0 - 10f64.powi(-k)), 0.0)).to_f64())
        .collect();
    out.push(check(
        "boundary decay",
        collar.windows(2).all(|w| w[1] <= w[0] + 1e-15) && *collar.last().unwrap() < 1e-5 * bound,
        format!("collar values {collar:?}"),
    ));
    let width = 0.1 * (outer - inner);
    let discs: Vec<_> = (0..24)
        .map(|k| {
            let rad = inner + 1.01 * width + (outer - inner - 2.02 * width) * (k as f64 + 0.5) / 24.0;
            (Complex64::from_polar(rad, 0.7 * k as f64), width)
        })
        .collect();
    let (ok, worst) = sub_mean_holds(p, &discs, 1e-9);
    out.push(check("sub-mean", ok, format!("worst slack {worst}")));
    if let Some(cut) = cut {
        let outside = spiral(400, outer)
            .into_iter()
            .filter(|w| w.norm() >= cut)
            .map(|w| p.eval(w).to_f64())
            .fold(0.0f64, f64::max);
        out.push(check("vanishes near boundary", outside == 0.0, format!("max on collar {outside}")));
    }
}
