//! Subharmonic models with exact Riesz charges, and δ-subharmonic majorants
//! `M = M_up - M_low`.
//!
//! Every closed-form charge here is checked in the test suite against a
//! finite-difference Laplacian of the model's evaluator.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::complex_json;
use crate::measures::{Atom, Extended, LogRadialProfile, RadialDensity, RieszCharge, WeightedPoint};
use crate::poly::Polynomial;

#[derive(Debug, Clone)]
pub enum SubharmonicModel {
    /// `σ |z|^ρ`.
    RadialPower { sigma: f64, rho: f64 },
    /// `σ ln(1 + |z|²)`.
    LogOnePlusSquare { sigma: f64 },
    /// `ln |q(z)|`, charge = unit atoms at the roots of `q`.
    LogAbsPoly { poly: Polynomial, roots: Vec<(Complex64, u32)> },
    /// `Re Σ c_k z^k`; zero charge.
    Harmonic { coeffs: Vec<Complex64> },
    /// `φ(ln |z|)` for a convex nondecreasing profile `φ`.
    CustomRadial(Arc<dyn LogRadialProfile>),
    Sum(Vec<SubharmonicModel>),
    Scaled { factor: f64, inner: Box<SubharmonicModel> },
}

pub fn make_radial_power(sigma: f64, rho: f64) -> Result<SubharmonicModel> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    Ok(SubharmonicModel::RadialPower { sigma, rho })
}

pub fn make_log_one_plus_square(sigma: f64) -> Result<SubharmonicModel> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    Ok(SubharmonicModel::LogOnePlusSquare { sigma })
}

/// `ln |q|` from ascending coefficients.
pub fn make_log_abs_poly(coeffs: Vec<Complex64>) -> Result<SubharmonicModel> {
    let poly = Polynomial::new(coeffs)?;
    let roots = poly.roots();
    Ok(SubharmonicModel::LogAbsPoly { poly, roots })
}

/// `ln |lead · Π (z - a)^m|` from known roots.
pub fn make_log_abs_poly_from_roots(lead: Complex64, roots: &[(Complex64, u32)]) -> Result<SubharmonicModel> {
    if lead.norm() == 0.0 {
        return Err(Error::InvalidParameter("leading coefficient is zero".into()));
    }
    let poly = Polynomial::from_roots(lead, roots)?;
    Ok(SubharmonicModel::LogAbsPoly {
        poly,
        roots: roots.to_vec(),
    })
}

pub fn make_harmonic(coeffs: Vec<Complex64>) -> SubharmonicModel {
    SubharmonicModel::Harmonic { coeffs }
}

/// Accepts a radial profile after spot-checking convexity and monotonicity of
/// `φ` on `ln r ∈ [-12, 12]`.
pub fn make_custom_radial(profile: Arc<dyn LogRadialProfile>) -> Result<SubharmonicModel> {
    let h = 1e-3;
    for k in 0..=240 {
        let s = -12.0 + 0.1 * k as f64;
        let second = profile.value(s + h) - 2.0 * profile.value(s) + profile.value(s - h);
        let scale = 1e-7 * (1.0 + profile.value(s).abs());
        if second < -scale || profile.curvature(s) < -1e-9 {
            return Err(Error::InvalidParameter(format!("profile is not convex in ln r near ln r = {s}")));
        }
        if profile.slope(s) < -1e-12 {
            return Err(Error::InvalidParameter(format!("profile decreases near ln r = {s}")));
        }
    }
    Ok(SubharmonicModel::CustomRadial(profile))
}

impl SubharmonicModel {
    pub fn zero() -> Self {
        SubharmonicModel::Harmonic { coeffs: Vec::new() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            SubharmonicModel::RadialPower { sigma, rho } => SubharmonicModel::RadialPower {
                sigma: sigma * factor,
                rho: *rho,
            },
            SubharmonicModel::LogOnePlusSquare { sigma } => SubharmonicModel::LogOnePlusSquare { sigma: sigma * factor },
            SubharmonicModel::Harmonic { coeffs } => SubharmonicModel::Harmonic {
                coeffs: coeffs.iter().map(|c| c * factor).collect(),
            },
            other => SubharmonicModel::Scaled {
                factor,
                inner: Box::new(other.clone()),
            },
        }
    }

    pub fn eval(&self, z: Complex64) -> Extended {
        Extended::from_f64(self.eval_f64(z))
    }

    fn eval_f64(&self, z: Complex64) -> f64 {
        match self {
            SubharmonicModel::RadialPower { sigma, rho } => sigma * z.norm().powf(*rho),
            SubharmonicModel::LogOnePlusSquare { sigma } => sigma * z.norm_sqr().ln_1p(),
            SubharmonicModel::LogAbsPoly { poly, roots } => {
                let mut acc = poly.leading().norm().ln();
                for &(a, m) in roots {
                    acc += m as f64 * (z - a).norm().ln();
                }
                acc
            }
            SubharmonicModel::Harmonic { coeffs } => {
                coeffs
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
                    .re
            }
            SubharmonicModel::CustomRadial(p) => p.value(z.norm().ln()),
            SubharmonicModel::Sum(terms) => {
                let mut acc = 0.0;
                for t in terms {
                    let v = t.eval_f64(z);
                    if v == f64::NEG_INFINITY {
                        return v;
                    }
                    acc += v;
                }
                acc
            }
            SubharmonicModel::Scaled { factor, inner } => {
                let v = inner.eval_f64(z);
                if *factor == 0.0 {
                    0.0
                } else {
                    factor * v
                }
            }
        }
    }

    pub fn riesz(&self) -> RieszCharge {
        match self {
            SubharmonicModel::RadialPower { sigma, rho } => RieszCharge::radial(RadialDensity::Power {
                coefficient: sigma * rho * rho,
                exponent: rho - 1.0,
            }),
            SubharmonicModel::LogOnePlusSquare { sigma } => {
                RieszCharge::radial(RadialDensity::LogOnePlusSquare { coefficient: *sigma })
            }
            SubharmonicModel::LogAbsPoly { roots, .. } => RieszCharge::from_atoms(
                roots
                    .iter()
                    .map(|&(location, m)| Atom {
                        location,
                        mass: m as f64,
                    })
                    .collect(),
            ),
            SubharmonicModel::Harmonic { .. } => RieszCharge::zero(),
            SubharmonicModel::CustomRadial(p) => RieszCharge::radial(RadialDensity::Profile(p.clone())),
            SubharmonicModel::Sum(terms) => terms
                .iter()
                .fold(RieszCharge::zero(), |acc, t| acc.plus(&t.riesz())),
            SubharmonicModel::Scaled { factor, inner } => inner.riesz().scaled(*factor),
        }
    }

    pub fn is_radial(&self) -> bool {
        match self {
            SubharmonicModel::RadialPower { .. }
            | SubharmonicModel::LogOnePlusSquare { .. }
            | SubharmonicModel::CustomRadial(_) => true,
            SubharmonicModel::Harmonic { coeffs } => coeffs.iter().skip(1).all(|c| c.norm() == 0.0),
            SubharmonicModel::LogAbsPoly { .. } => false,
            SubharmonicModel::Sum(terms) => terms.iter().all(Self::is_radial),
            SubharmonicModel::Scaled { inner, .. } => inner.is_radial(),
        }
    }
}

impl Field for SubharmonicModel {
    fn eval(&self, z: Complex64) -> f64 {
        self.eval_f64(z)
    }

    fn singular_points(&self) -> Vec<Complex64> {
        match self {
            SubharmonicModel::RadialPower { .. } | SubharmonicModel::CustomRadial(_) => {
                vec![Complex64::new(0.0, 0.0)]
            }
            SubharmonicModel::LogAbsPoly { roots, .. } => roots.iter().map(|r| r.0).collect(),
            SubharmonicModel::Sum(terms) => terms.iter().flat_map(|t| t.singular_points()).collect(),
            SubharmonicModel::Scaled { inner, .. } => inner.singular_points(),
            _ => Vec::new(),
        }
    }

    fn radial_center(&self) -> Option<Complex64> {
        self.is_radial().then(|| Complex64::new(0.0, 0.0))
    }

    fn exact_circle_mean(&self, z: Complex64, t: f64) -> Option<f64> {
        match self {
            SubharmonicModel::RadialPower { sigma, rho } if *rho == 2.0 => Some(sigma * (z.norm_sqr() + t * t)),
            SubharmonicModel::RadialPower { sigma, rho } if *rho == 1.0 => {
                // (1/2π)∫|z + t e^{iθ}| dθ = (2/π)(a + t) E(k), k = 2√(at)/(a + t)
                let a = z.norm();
                if a + t == 0.0 {
                    return Some(0.0);
                }
                let m = 4.0 * a * t / ((a + t) * (a + t));
                Some(sigma * std::f64::consts::FRAC_2_PI * (a + t) * elliptic_e(m))
            }
            SubharmonicModel::LogAbsPoly { poly, roots } => {
                // Jensen: the mean of ln|w - a| is ln max(|z - a|, t).
                let mut acc = poly.leading().norm().ln();
                for &(a, m) in roots {
                    acc += m as f64 * (z - a).norm().max(t).ln();
                }
                Some(acc)
            }
            SubharmonicModel::Harmonic { .. } => Some(self.eval_f64(z)),
            SubharmonicModel::Sum(terms) => terms.iter().map(|u| u.exact_circle_mean(z, t)).sum(),
            SubharmonicModel::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    Some(0.0)
                } else {
                    inner.exact_circle_mean(z, t).map(|v| factor * v)
                }
            }
            _ => None,
        }
    }
}

/// Complete elliptic integral of the second kind `E(m)`, `m = k²`, by the
/// arithmetic-geometric mean.
pub fn elliptic_e(m: f64) -> f64 {
    if m >= 1.0 {
        return 1.0;
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        if c.abs() <= 1e-15 * a {
            break;
        }
    }
    std::f64::consts::FRAC_PI_2 / a * (1.0 - sum)
}

/// `M = M_up - M_low` with charge `Δ_M = Δ_{M_up} - Δ_{M_low}`.
#[derive(Debug, Clone)]
pub struct DSubharmonicMajorant {
    pub up: SubharmonicModel,
    pub low: SubharmonicModel,
}

impl DSubharmonicMajorant {
    pub fn new(up: SubharmonicModel, low: SubharmonicModel) -> Self {
        Self { up, low }
    }

    pub fn subharmonic(up: SubharmonicModel) -> Self {
        Self::new(up, SubharmonicModel::zero())
    }

    pub fn charge(&self) -> RieszCharge {
        self.up.riesz().minus(&self.low.riesz())
    }

    /// `M(z)`, with `M(z) = +∞` wherever `M_low(z) = -∞`.
    pub fn eval(&self, z: Complex64) -> Extended {
        eval_m(self, z)
    }
}

pub fn eval_m(m: &DSubharmonicMajorant, z: Complex64) -> Extended {
    match (m.up.eval(z), m.low.eval(z)) {
        (_, Extended::NegInfinity) => Extended::PosInfinity,
        (Extended::NegInfinity, _) => Extended::NegInfinity,
        (Extended::PosInfinity, _) => Extended::PosInfinity,
        (Extended::Finite(u), Extended::Finite(l)) => Extended::Finite(u - l),
        (Extended::Finite(_), Extended::PosInfinity) => Extended::NegInfinity,
    }
}

/// JSON description of a subharmonic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    RadialPower {
        #[serde(default = "unit")]
        sigma: f64,
        rho: f64,
    },
    LogPoly {
        #[serde(default = "unit")]
        sigma: f64,
    },
    LogAbsPoly {
        #[serde(default)]
        coeffs: Option<Vec<ComplexValue>>,
        #[serde(default)]
        roots: Option<Vec<WeightedPoint>>,
        #[serde(default)]
        lead: Option<ComplexValue>,
    },
    Harmonic {
        coeffs: Vec<ComplexValue>,
    },
    Zero,
    Sum {
        terms: Vec<ModelSpec>,
    },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue(#[serde(with = "complex_json")] pub Complex64);

impl ModelSpec {
    pub fn build(&self) -> Result<SubharmonicModel> {
        match self {
            ModelSpec::RadialPower { sigma, rho } => make_radial_power(*sigma, *rho),
            ModelSpec::LogPoly { sigma } => make_log_one_plus_square(*sigma),
            ModelSpec::LogAbsPoly { coeffs, roots, lead } => match (coeffs, roots) {
                (Some(c), None) => make_log_abs_poly(c.iter().map(|v| v.0).collect()),
                (None, Some(r)) => {
                    let roots: Vec<_> = r.iter().map(|p| (p.location(), p.mult)).collect();
                    if roots.iter().any(|r| r.1 == 0) {
                        return Err(Error::InvalidParameter("root multiplicity must be >= 1".into()));
                    }
                    make_log_abs_poly_from_roots(lead.map_or(Complex64::new(1.0, 0.0), |l| l.0), &roots)
                }
                _ => Err(Error::InvalidParameter(
                    "log-abs-poly needs exactly one of `coeffs` or `roots`".into(),
                )),
            },
            ModelSpec::Harmonic { coeffs } => Ok(make_harmonic(coeffs.iter().map(|v| v.0).collect())),
            ModelSpec::Zero => Ok(SubharmonicModel::zero()),
            ModelSpec::Sum { terms } => Ok(SubharmonicModel::Sum(
                terms.iter().map(ModelSpec::build).collect::<Result<_>>()?,
            )),
        }
    }
}

/// `{"up": {...}, "low": {...}}`; `low` defaults to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MajorantSpec {
    pub up: ModelSpec,
    #[serde(default = "zero_spec")]
    pub low: ModelSpec,
}

fn zero_spec() -> ModelSpec {
    ModelSpec::Zero
}

impl MajorantSpec {
    pub fn build(&self) -> Result<DSubharmonicMajorant> {
        Ok(DSubharmonicMajorant::new(self.up.build()?, self.low.build()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Region;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exact_circle_means_match_quadrature() {
        use crate::circle::full_circle_mean;
        use crate::field::WithSingularities;
        let models = vec![
            make_radial_power(1.5, 1.0).unwrap(),
            make_radial_power(0.5, 2.0).unwrap(),
            make_log_abs_poly_from_roots(c(2.0, 1.0), &[(c(0.3, -0.2), 2), (c(-1.0, 0.5), 1)]).unwrap(),
            SubharmonicModel::Sum(vec![
                make_harmonic(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
                make_radial_power(1.0, 1.0).unwrap(),
            ]),
        ];
        for u in &models {
            let plain = WithSingularities::new(|w| u.eval_f64(w), u.singular_points());
            for (z, t) in [(c(0.4, 0.3), 0.5), (c(-2.0, 1.0), 0.3), (c(0.1, 0.0), 1.7), (c(0.3, 0.4), 0.5)] {
                let exact = u.exact_circle_mean(z, t).unwrap();
                let quad = full_circle_mean(&plain, z, t, 1e-12).unwrap().value;
                assert!((exact - quad).abs() < 1e-9, "{exact} vs {quad} at {z}, {t}");
            }
        }
        assert!((elliptic_e(0.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((elliptic_e(0.5) - 1.350_643_881_047_675_5).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(make_radial_power(0.0, 1.0).is_err());
        assert!(make_radial_power(1.0, 0.0).is_err());
        assert!(make_radial_power(1.0, -2.0).is_err());
        assert!(make_log_abs_poly(vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn log_abs_poly_atoms() {
        let m = make_log_abs_poly(vec![c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let atoms = m.riesz().atoms().to_vec();
        assert_eq!(atoms.len(), 1);
        assert!((atoms[0].location - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(atoms[0].mass, 1.0);

        // (z-1)^2 (z+i) = z^3 + (i-2) z^2 + (1-2i) z + i
        let q = make_log_abs_poly(vec![c(0.0, 1.0), c(1.0, -2.0), c(-2.0, 1.0), c(1.0, 0.0)]).unwrap();
        let mut atoms = q.riesz().atoms().to_vec();
        atoms.sort_by(|a, b| a.mass.total_cmp(&b.mass));
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0].mass, 1.0);
        assert!((atoms[0].location - c(0.0, -1.0)).norm() < 1e-9);
        assert_eq!(atoms[1].mass, 2.0);
        assert!((atoms[1].location - c(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn eval_m_conventions() {
        let m = DSubharmonicMajorant::subharmonic(make_radial_power(1.0, 1.0).unwrap());
        assert_eq!(m.eval(c(3.0, 0.0)), Extended::Finite(3.0));

        let low = make_log_abs_poly(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let m = DSubharmonicMajorant::new(make_radial_power(1.0, 1.0).unwrap(), low);
        assert_eq!(m.eval(c(0.0, 0.0)), Extended::PosInfinity);

        let m = DSubharmonicMajorant::new(make_radial_power(1.0, 2.0).unwrap(), make_radial_power(1.0, 1.0).unwrap());
        assert_eq!(m.eval(c(2.0, 0.0)), Extended::Finite(2.0));
    }

    #[test]
    fn charge_of_difference() {
        let m = DSubharmonicMajorant::new(make_radial_power(1.0, 2.0).unwrap(), make_radial_power(1.0, 1.0).unwrap());
        let disk = Region::disk(c(0.0, 0.0), 1.5).unwrap();
        let q = m.charge().on_region(&disk, 1e-12).unwrap();
        // 2 t^2 - t at t = 1.5
        assert!((q.value - (2.0 * 2.25 - 1.5)).abs() < 1e-10);
    }

    #[test]
    fn spec_json_roundtrip() {
        let js = r#"{"up":{"kind":"radial-power","sigma":2.0,"rho":1.0},"low":{"kind":"log-abs-poly","roots":[{"re":1.0,"im":0.0,"mult":2}]}}"#;
        let spec: MajorantSpec = serde_json::from_str(js).unwrap();
        let m = spec.build().unwrap();
        assert_eq!(m.eval(c(1.0, 0.0)), Extended::PosInfinity);
        let back: MajorantSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let defaulted: MajorantSpec = serde_json::from_str(r#"{"up":{"kind":"log-poly"}}"#).unwrap();
        assert_eq!(defaulted.low, ModelSpec::Zero);
    }
}
