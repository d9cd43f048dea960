//! Necessary conditions: the margin `Σ v(z_j) - ∫ v dΔ_M` over a test family,
//! the (M0) regularity check and the constants of the disk-domain lemma.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Execution};
use crate::field::{Field, QuadratureOnly};
use crate::geometry::Region;
use crate::jensen::{green_disk, GreenDisk};
use crate::majorants::{DSubharmonicMajorant, SubharmonicModel};
use crate::means::circle_mean;
use crate::measures::{Extended, RieszCharge, ZeroDistribution};
use crate::testfam::{inversion_pullback, FamilySpec, InvertedPotential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Violated,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginSample {
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Absolute error budget of `margin`.
    pub budget: f64,
    /// Points of `Z` inside the support of the test function.
    pub points: usize,
    /// Set when the sample was dropped.
    pub dropped: Option<String>,
}

impl MarginSample {
    pub fn retained(&self) -> bool {
        self.dropped.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginFit {
    /// Slope of `ln margin` against `ln τ` over the top decade, when every
    /// margin there is clearly positive.
    pub growth_exponent: Option<f64>,
    /// `a` in the least-squares model `margin ≈ a τ + b ln τ + c`.
    pub linear_rate: Option<f64>,
    pub log_coefficient: Option<f64>,
    /// Coefficient of determination of the linear-rate model.
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginCurve {
    pub samples: Vec<MarginSample>,
    pub verdict: Verdict,
    pub fit: MarginFit,
}

impl MarginCurve {
    pub fn retained(&self) -> impl Iterator<Item = &MarginSample> {
        self.samples.iter().filter(|s| s.retained())
    }

    pub fn dropped(&self) -> usize {
        self.samples.iter().filter(|s| !s.retained()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Absolute quadrature tolerance for each right-hand side.
    pub tol: f64,
    pub exec: Execution,
    /// Lower end of the linear-rate fit.
    pub fit_from: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            exec: Execution::default(),
            fit_from: 10.0,
        }
    }
}

/// Sweeps `τ` over the family grid and evaluates
/// `Σ mult_j v_τ(z_j)` against `∫ v_τ dΔ_M`, `v_τ(z) = p_τ(1/conj z)`.
pub fn margin_sweep(
    z: &ZeroDistribution,
    m: &DSubharmonicMajorant,
    family: &FamilySpec,
    opts: &SweepOptions,
) -> Result<MarginCurve> {
    if z.contains_origin() {
        return Err(Error::PoleAtOrigin);
    }
    let grid = family.grid()?;
    let charge = m.charge();
    let rows: Vec<Result<MarginSample>> = opts.exec.map(&grid, |&tau| {
        let v = inversion_pullback(&family.member(tau)?)?;
        margin_sample(z, &charge, &v, tau, opts.tol)
    });
    let samples = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let fit = fit_margin(&samples, opts.fit_from);
    let verdict = decide(&samples, &fit);
    Ok(MarginCurve { samples, verdict, fit })
}

fn margin_sample(
    z: &ZeroDistribution,
    charge: &RieszCharge,
    v: &InvertedPotential,
    tau: f64,
    tol: f64,
) -> Result<MarginSample> {
    let support = v.support();
    let mut terms: Vec<f64> = z
        .points_within(support)
        .into_iter()
        .map(|(p, mult)| mult as f64 * v.eval(p).to_f64())
        .collect();
    terms.sort_by(f64::total_cmp);
    let lhs = pairwise_sum(&terms);
    let lhs_budget = terms.len() as f64 * f64::EPSILON * terms.iter().map(|t| t.abs()).sum::<f64>();

    let mut sample = MarginSample {
        tau,
        lhs,
        rhs: f64::NAN,
        margin: f64::NAN,
        budget: f64::NAN,
        points: terms.len(),
        dropped: None,
    };
    match rhs_integral(charge, v, support, tol) {
        Ok((rhs, err)) => {
            sample.rhs = rhs;
            sample.margin = lhs - rhs;
            sample.budget = err + lhs_budget;
        }
        Err(reason) => sample.dropped = Some(reason),
    }
    Ok(sample)
}

const NOT_SUMMABLE: &str = "not Δ_M-summable";

/// `∫ v dΔ_M` over the punctured support disk, or the reason it diverges.
fn rhs_integral(charge: &RieszCharge, v: &InvertedPotential, support: f64, tol: f64) -> std::result::Result<(f64, f64), String> {
    if charge
        .atoms()
        .iter()
        .any(|a| a.location.norm() == 0.0 && a.mass != 0.0)
    {
        return Err(format!("{NOT_SUMMABLE}: charge has an atom at the pole"));
    }
    let region = Region::Disk {
        center: Complex64::new(0.0, 0.0),
        radius: support,
    };
    if charge.has_radial_part() {
        // Tails ∫_{ε_k}^{ε_{k-1}} on a shrinking ladder must contract.
        let ladder: Vec<f64> = (1..=5).map(|k| support * 10f64.powi(-2 * k)).collect();
        let partial: Vec<f64> = ladder
            .iter()
            .map(|&eps| charge.integrate_field_from(v, &region, eps, tol).map(|q| q.value))
            .collect::<Result<_>>()
            .map_err(|e| format!("{NOT_SUMMABLE}: {e}"))?;
        let steps: Vec<f64> = partial.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let n = steps.len();
        let contracting = steps[n - 1] <= 0.5 * steps[n - 2] || steps[n - 1] <= tol;
        if !contracting {
            return Err(format!("{NOT_SUMMABLE}: radial tail steps {steps:?} do not contract"));
        }
    }
    charge
        .integrate_field(v, &region, tol)
        .map(|q| (q.value, q.error))
        .map_err(|e| format!("{NOT_SUMMABLE}: {e}"))
}

fn least_squares(xs: &[Vec<f64>], ys: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = xs.first()?.len();
    if ys.len() < k + 1 {
        return None;
    }
    let mut a = vec![vec![0.0; k + 1]; k];
    for (row, &y) in xs.iter().zip(ys) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += row[i] * row[j];
            }
            a[i][k] += row[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        a.swap(col, pivot);
        if a[col][col].abs() < 1e-300 {
            return None;
        }
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(row, y)| (y - row.iter().zip(&beta).map(|(x, b)| x * b).sum::<f64>()).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some((beta, r2))
}

fn top_decade(samples: &[MarginSample]) -> Vec<&MarginSample> {
    let kept: Vec<&MarginSample> = samples.iter().filter(|s| s.retained()).collect();
    let Some(last) = kept.last() else {
        return Vec::new();
    };
    let floor = last.tau / 10.0;
    kept.into_iter().filter(|s| s.tau >= floor * (1.0 - 1e-12)).collect()
}

fn fit_margin(samples: &[MarginSample], fit_from: f64) -> MarginFit {
    let top = top_decade(samples);
    let growth_exponent = if top.len() >= 3 && top.iter().all(|s| s.margin > 10.0 * s.budget && s.margin > 0.0) {
        let xs: Vec<Vec<f64>> = top.iter().map(|s| vec![s.tau.ln(), 1.0]).collect();
        let ys: Vec<f64> = top.iter().map(|s| s.margin.ln()).collect();
        least_squares(&xs, &ys).map(|(b, _)| b[0])
    } else {
        None
    };
    let tail: Vec<&MarginSample> = samples.iter().filter(|s| s.retained() && s.tau >= fit_from).collect();
    let linear = if tail.len() >= 4 {
        let xs: Vec<Vec<f64>> = tail.iter().map(|s| vec![s.tau, s.tau.ln(), 1.0]).collect();
        let ys: Vec<f64> = tail.iter().map(|s| s.margin).collect();
        least_squares(&xs, &ys)
    } else {
        None
    };
    MarginFit {
        growth_exponent,
        linear_rate: linear.as_ref().map(|(b, _)| b[0]),
        log_coefficient: linear.as_ref().map(|(b, _)| b[1]),
        confidence: linear.as_ref().map(|(_, r2)| *r2),
    }
}

/// `violated`: log-log slope at least 0.5 over the top decade, with the final
/// margin above ten error budgets and still increasing. `consistent`: the
/// top-decade margins stay within ten budgets of zero, or below the largest
/// margin seen before the top decade.
fn decide(samples: &[MarginSample], fit: &MarginFit) -> Verdict {
    let top = top_decade(samples);
    if top.len() < 3 {
        return Verdict::Inconclusive;
    }
    let last = top[top.len() - 1];
    let prev = top[top.len() - 2];
    if let Some(k) = fit.growth_exponent {
        if k >= 0.5 && last.margin > 10.0 * last.budget && last.margin >= prev.margin {
            return Verdict::Violated;
        }
    }
    let floor = top[0].tau;
    let top_max = top.iter().map(|s| s.margin - 10.0 * s.budget).fold(f64::NEG_INFINITY, f64::max);
    if top_max <= 0.0 {
        return Verdict::Consistent;
    }
    let earlier_max = samples
        .iter()
        .filter(|s| s.retained() && s.tau < floor)
        .map(|s| s.margin)
        .fold(f64::NEG_INFINITY, f64::max);
    if top_max <= earlier_max {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    }
}

/// Sample layout for [`check_m0`]: the unit disk and dyadic shells
/// `2^k < |z| <= 2^(k+1)` up to `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct M0Grid {
    pub r_max: f64,
    #[serde(default = "default_radii")]
    pub radii_per_shell: usize,
    #[serde(default = "default_angles")]
    pub angles: usize,
}

fn default_radii() -> usize {
    4
}

fn default_angles() -> usize {
    8
}

impl M0Grid {
    pub fn new(r_max: f64) -> Self {
        Self {
            r_max,
            radii_per_shell: default_radii(),
            angles: default_angles(),
        }
    }

    /// `(shell index, z)`; shell 0 is the unit disk.
    fn points(&self) -> Vec<(usize, Complex64)> {
        let mut out = Vec::new();
        let mut shell = 0;
        let mut lo = 0.0;
        let mut hi: f64 = 1.0;
        while lo < self.r_max {
            let top = hi.min(self.r_max);
            for i in 0..self.radii_per_shell {
                let r = lo + (top - lo) * (i as f64 + 1.0) / self.radii_per_shell as f64;
                for k in 0..self.angles {
                    let theta = std::f64::consts::TAU * (k as f64 + 0.5 * (i % 2) as f64) / self.angles as f64;
                    out.push((shell, Complex64::from_polar(r, theta)));
                }
            }
            shell += 1;
            lo = hi;
            hi *= 2.0;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct M0Cell {
    pub shell: usize,
    pub re: f64,
    pub im: f64,
    pub deviation: f64,
    pub error: f64,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct M0Report {
    pub p: f64,
    pub cells: Vec<M0Cell>,
    /// Running supremum of the deviation over shells `0..=k`.
    pub shell_sup: Vec<f64>,
    pub c_estimate: f64,
    pub bounded: bool,
    pub flagged: usize,
}

/// `deviation(z) = M_up^{⊙(1+|z|)^-P}(z) - M_up(z)` on the grid. The estimate
/// is bounded when the running supremum changes by at most 1% between the two
/// outermost shells.
pub fn check_m0(m_up: &SubharmonicModel, p: f64, grid: &M0Grid, tol: f64, exec: Execution) -> Result<M0Report> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("P must be >= 0, got {p}")));
    }
    if !(grid.r_max > 0.0) || grid.radii_per_shell == 0 || grid.angles == 0 {
        return Err(Error::InvalidParameter("empty (M0) grid".into()));
    }
    let pts = grid.points();
    let cells: Vec<M0Cell> = exec.map(&pts, |&(shell, z)| {
        let r = (1.0 + z.norm()).powf(-p);
        let mut cell = M0Cell {
            shell,
            re: z.re,
            im: z.im,
            deviation: f64::NAN,
            error: f64::NAN,
            flag: None,
        };
        // By quadrature, so harmonic inputs really probe the mean-value property.
        match (circle_mean(&QuadratureOnly(m_up), z, r, tol), m_up.eval(z)) {
            (Ok(q), Extended::Finite(v)) => {
                cell.deviation = q.value - v;
                cell.error = q.error;
            }
            (Ok(_), Extended::NegInfinity) => cell.flag = Some("M_up(z) = -inf".into()),
            (Ok(_), other) => cell.flag = Some(format!("M_up(z) = {other}")),
            (Err(e), _) => cell.flag = Some(e.to_string()),
        }
        cell
    });
    let shells = pts.last().map_or(0, |p| p.0 + 1);
    let mut shell_sup = Vec::with_capacity(shells);
    let mut running = f64::NEG_INFINITY;
    for k in 0..shells {
        for c in cells.iter().filter(|c| c.shell == k && c.flag.is_none()) {
            running = running.max(c.deviation);
        }
        shell_sup.push(running);
    }
    let c_estimate = running;
    let bounded = shell_sup.len() >= 2 && {
        let (a, b) = (shell_sup[shells - 2], shell_sup[shells - 1]);
        (b - a).abs() <= 0.01 * b.abs().max(a.abs()) + 10.0 * tol
    };
    let flagged = cells.iter().filter(|c| c.flag.is_some()).count();
    Ok(M0Report {
        p,
        cells,
        shell_sup,
        c_estimate,
        bounded,
        flagged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma1Setup {
    #[serde(with = "crate::geometry::complex_json")]
    pub outer_center: Complex64,
    pub outer_radius: f64,
    #[serde(with = "crate::geometry::complex_json")]
    pub inner_center: Complex64,
    pub inner_radius: f64,
    #[serde(with = "crate::geometry::complex_json")]
    pub z0: Complex64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Constants {
    pub setup: Lemma1Setup,
    /// `inf_{∂S} g(·, z0)`.
    pub green_inf: f64,
    /// `b / inf_{∂S} g`.
    pub c: f64,
    /// `∫_{D̃∖z0} g dΔ_M`.
    pub charge_term: f64,
    /// `∫_{D̃∖S} g dΔ_M^-`.
    pub lower_term: f64,
    /// `M⁺(z0)`.
    pub positive_part: f64,
    pub c_bar: Extended,
}

/// Green function of a disk with arbitrary centre.
struct ShiftedGreen {
    center: Complex64,
    g: GreenDisk,
}

impl Field for ShiftedGreen {
    fn eval(&self, z: Complex64) -> f64 {
        self.g.eval(z - self.center).to_f64()
    }

    fn singular_points(&self) -> Vec<Complex64> {
        vec![self.g.pole + self.center]
    }

    fn radial_center(&self) -> Option<Complex64> {
        (self.g.pole.norm() == 0.0).then_some(self.center)
    }
}

/// `C = b / inf_{∂S} g_{D̃}(·, z0)` and
/// `C̄_M = ∫_{D̃∖z0} g dΔ_M + ∫_{D̃∖S} g dΔ_M^- + M⁺(z0)` for disks `S ⋐ D̃`.
pub fn lemma1_constants(setup: Lemma1Setup, m: &DSubharmonicMajorant, tol: f64) -> Result<Lemma1Constants> {
    let Lemma1Setup {
        outer_center,
        outer_radius,
        inner_center,
        inner_radius,
        z0,
        b,
    } = setup;
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidSetup(format!("b must be positive, got {b}")));
    }
    if !(inner_radius > 0.0 && (inner_center - outer_center).norm() + inner_radius < outer_radius) {
        return Err(Error::InvalidSetup("S must be compactly contained in the outer disk".into()));
    }
    if !((z0 - inner_center).norm() < inner_radius) {
        return Err(Error::InvalidSetup(format!("z0 = {z0} is not interior to S")));
    }
    let (up, low) = (m.up.eval(z0), m.low.eval(z0));
    if up == Extended::NegInfinity || low == Extended::NegInfinity {
        return Err(Error::InvalidSetup("M_up(z0) + M_low(z0) = -inf".into()));
    }
    let green = ShiftedGreen {
        center: outer_center,
        g: green_disk(outer_radius, z0 - outer_center)?,
    };

    let on_boundary = |theta: f64| green.eval(inner_center + Complex64::from_polar(inner_radius, theta));
    let n = 4096;
    let step = std::f64::consts::TAU / n as f64;
    let (mut best, mut arg) = (f64::INFINITY, 0.0);
    for k in 0..n {
        let v = on_boundary(step * k as f64);
        if v < best {
            best = v;
            arg = step * k as f64;
        }
    }
    let green_inf = best.min(golden_min(&on_boundary, arg - step, arg + step));
    if !(green_inf > 0.0) {
        return Err(Error::InvalidSetup(format!("Green function infimum {green_inf} on ∂S is not positive")));
    }

    let charge = m.charge();
    let outer = Region::disk(outer_center, outer_radius)?;
    let inner = Region::disk(inner_center, inner_radius)?;
    let charge_term = charge.integrate_field(&green, &outer, tol)?.value;
    let lower = charge.lower();
    let lower_term =
        lower.integrate_field(&green, &outer, tol)?.value - lower.integrate_field(&green, &inner, tol)?.value;
    let positive_part = match m.eval(z0) {
        Extended::Finite(v) => v.max(0.0),
        Extended::PosInfinity => f64::INFINITY,
        Extended::NegInfinity => 0.0,
    };
    Ok(Lemma1Constants {
        setup,
        green_inf,
        c: b / green_inf,
        charge_term,
        lower_term,
        positive_part,
        c_bar: Extended::from_f64(charge_term + lower_term + positive_part),
    })
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
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
    fc.min(fd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorants::{make_harmonic, make_log_abs_poly_from_roots, make_radial_power};
    use crate::measures::Generator;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn abs_z() -> DSubharmonicMajorant {
        DSubharmonicMajorant::subharmonic(make_radial_power(1.0, 1.0).unwrap())
    }

    #[test]
    fn empty_distribution_is_consistent() {
        let curve = margin_sweep(
            &ZeroDistribution::empty(),
            &abs_z(),
            &FamilySpec::truncated_log(1.0, 50.0),
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(curve.verdict, Verdict::Consistent);
        for s in &curve.samples {
            assert!((s.rhs - s.tau).abs() < 1e-7, "{s:?}");
            assert!(s.margin <= 0.0);
        }
    }

    #[test]
    fn origin_point_is_rejected() {
        let z = ZeroDistribution::from_points([(c(0.0, 0.0), 1)]).unwrap();
        let err = margin_sweep(&z, &abs_z(), &FamilySpec::truncated_log(1.0, 2.0), &SweepOptions::default());
        assert_eq!(err.unwrap_err(), Error::PoleAtOrigin);
    }

    #[test]
    fn atom_at_pole_drops_samples() {
        let m = DSubharmonicMajorant::subharmonic(
            make_log_abs_poly_from_roots(c(1.0, 0.0), &[(c(0.0, 0.0), 1)]).unwrap(),
        );
        let curve = margin_sweep(
            &ZeroDistribution::empty(),
            &m,
            &FamilySpec::truncated_log(1.0, 2.0),
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(curve.dropped(), curve.samples.len());
    }

    #[test]
    fn gaussian_lattice_is_violated() {
        let z = ZeroDistribution::from_generator(Generator::GaussianLattice {
            spacing: 1.0,
            max_radius: Some(60.0),
        })
        .unwrap();
        let curve = margin_sweep(&z, &abs_z(), &FamilySpec::truncated_log(1.0, 50.0), &SweepOptions::default()).unwrap();
        assert_eq!(curve.verdict, Verdict::Violated);
        let k = curve.fit.growth_exponent.unwrap();
        assert!((1.8..=2.2).contains(&k), "{k}");
    }

    #[test]
    fn m0_examples() {
        let grid = M0Grid::new(16.0);
        let sq = make_radial_power(1.0, 2.0).unwrap();
        let r = check_m0(&sq, 0.0, &grid, 1e-11, Execution::Sequential).unwrap();
        assert!(r.bounded);
        assert!((r.c_estimate - 1.0).abs() < 1e-9);
        let h = make_harmonic(vec![c(1.0, 0.0), c(0.0, 2.0), c(0.5, -0.5)]);
        let r = check_m0(&h, 1.0, &grid, 1e-12, Execution::Sequential).unwrap();
        assert!(r.cells.iter().all(|c| c.deviation.abs() < 1e-10));
        let abs = make_radial_power(1.0, 1.0).unwrap();
        let r = check_m0(&abs, 1.0, &grid, 1e-12, Execution::Sequential).unwrap();
        assert!(r.bounded && r.c_estimate < 1.0, "{:?}", r.shell_sup);
    }

    #[test]
    fn lemma1_concentric_example() {
        let setup = Lemma1Setup {
            outer_center: c(0.0, 0.0),
            outer_radius: 1.0,
            inner_center: c(0.0, 0.0),
            inner_radius: 0.5,
            z0: c(0.0, 0.0),
            b: 1.0,
        };
        let zero = DSubharmonicMajorant::subharmonic(SubharmonicModel::zero());
        let k = lemma1_constants(setup, &zero, 1e-12).unwrap();
        assert!((k.c - 1.0 / 2f64.ln()).abs() < 1e-10);
        assert_eq!(k.c_bar, Extended::Finite(0.0));

        let bad = Lemma1Setup {
            inner_radius: 1.0,
            ..setup
        };
        assert!(matches!(lemma1_constants(bad, &zero, 1e-12), Err(Error::InvalidSetup(_))));
    }
}
