//! Sufficiency side: canonical products over `Z`, the remainder term and the
//! pointwise verification `ln|f| <= M_up^{⊙r̂} - M_low + R`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::majorants::DSubharmonicMajorant;
use crate::means::{circle_mean, hat_radius, radius, RadiusProfile};
use crate::measures::{Extended, Generator, ZeroDistribution};
use crate::necessary::Verdict;

pub const MAX_GENUS: u32 = 8;
pub const GUARD_RADIUS: f64 = 1e-12;
/// Retained zeros per symmetry class.
pub const DEFAULT_PER_CLASS: usize = 10_000;

/// Smallest `p` with `Σ |z_j|^(-p-1) < ∞`: analytic for generator-backed
/// distributions, otherwise read off dyadic block sums over `|z| <= probe`.
pub fn genus(z: &ZeroDistribution, probe: Option<f64>) -> Result<u32> {
    if z.contains_origin() {
        return Err(Error::PoleAtOrigin);
    }
    if let Some(g) = z.generator() {
        let p = g.density_exponent().floor() as u32;
        return if p > MAX_GENUS {
            Err(Error::GenusOverflow { max: MAX_GENUS })
        } else {
            Ok(p)
        };
    }
    let extent = z.extent().unwrap_or(0.0);
    let probe = probe.unwrap_or(extent).min(extent);
    let pts = z.points_within(probe);
    if pts.is_empty() {
        return Ok(0);
    }
    // Blocks 2^k < |z| <= 2^(k+1) lying entirely inside the probe disk.
    let first = pts
        .iter()
        .map(|p| p.0.norm().log2().floor() as i32)
        .min()
        .unwrap_or(0);
    let last = probe.log2().floor() as i32 - 1;
    if last - first < 3 {
        return Ok(0);
    }
    for p in 0..=MAX_GENUS {
        let q = p as i32 + 1;
        let blocks: Vec<f64> = (first..=last)
            .map(|k| {
                let (lo, hi) = (2f64.powi(k), 2f64.powi(k + 1));
                pts.iter()
                    .filter(|(w, _)| w.norm() > lo && w.norm() <= hi)
                    .map(|(w, m)| *m as f64 * w.norm().powi(-q))
                    .sum()
            })
            .collect();
        let n = blocks.len();
        let ratios: Vec<f64> = (n - 3..n)
            .map(|i| blocks[i] / blocks[i - 1])
            .filter(|r| r.is_finite())
            .collect();
        if !ratios.is_empty() && ratios.iter().sum::<f64>() / (ratios.len() as f64) <= 0.8 {
            return Ok(p);
        }
    }
    Err(Error::GenusOverflow { max: MAX_GENUS })
}

/// `ln E_p(u) = ln(1 - u) + Σ_{k<=p} u^k / k`, principal branch.
fn log_primary_factor(u: Complex64, p: u32) -> Complex64 {
    if u.norm() <= 0.5 {
        // -Σ_{k>p} u^k / k
        let mut term = u.powu(p + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut k = p + 1;
        loop {
            let contrib = term / k as f64;
            acc -= contrib;
            if contrib.norm() <= 1e-17 * acc.norm().max(1e-300) || k > p + 200 {
                break;
            }
            term *= u;
            k += 1;
        }
        acc
    } else {
        let mut acc = (Complex64::new(1.0, 0.0) - u).ln();
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 1..=p {
            pow *= u;
            acc += pow / k as f64;
        }
        acc
    }
}

/// `Re ln E_p(u)` in real arithmetic.
fn log_abs_primary_factor(u: Complex64, p: u32) -> f64 {
    let mut acc = if u.norm_sqr() <= 0.25 {
        0.5 * (u.norm_sqr() - 2.0 * u.re).ln_1p()
    } else {
        (Complex64::new(1.0, 0.0) - u).norm().ln()
    };
    let mut pow = Complex64::new(1.0, 0.0);
    for k in 1..=p {
        pow *= u;
        acc += pow.re / k as f64;
    }
    acc
}

fn symmetry_order(z: &ZeroDistribution) -> usize {
    match z.generator() {
        Some(Generator::Line { .. }) => 2,
        Some(Generator::GaussianLattice { .. }) => 4,
        _ => 1,
    }
}

/// Truncated canonical product `Π_{j<=K} E_p(z/z_j)^{mult_j}`.
#[derive(Debug, Clone)]
pub struct ProductRepresentation {
    pub genus: u32,
    zeros: Vec<(Complex64, u32)>,
    tail: TailModel,
}

#[derive(Debug, Clone)]
enum TailModel {
    None,
    /// Omitted finite set: `Σ mult |z_j|^-(p+1)` and the smallest modulus.
    Finite { inverse_power_sum: f64, min_modulus: f64 },
    /// Omitted points of an infinite generator, all with modulus `>= from`.
    Density { constant: f64, exponent: f64, from: f64 },
}

/// Value of `ln|f(z)|` with the bound on the omitted factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductValue {
    pub value: Extended,
    pub tail_bound: f64,
}

impl ProductRepresentation {
    /// Keeps the `per_class × symmetry` zeros of smallest modulus (all of
    /// them for finite distributions below that count).
    pub fn new(z: &ZeroDistribution, p: u32, per_class: Option<usize>) -> Result<Self> {
        if z.contains_origin() {
            return Err(Error::PoleAtOrigin);
        }
        let k = per_class.unwrap_or(DEFAULT_PER_CLASS).max(1) * symmetry_order(z);
        let (zeros, tail) = if z.is_finite() {
            let all = z.nearest(usize::MAX);
            let total: usize = all.iter().map(|x| x.1 as usize).sum();
            if total <= k {
                (all, TailModel::None)
            } else {
                let kept = z.nearest(k);
                let q = p as i32 + 1;
                let omitted = &all[kept.len()..];
                let tail = TailModel::Finite {
                    inverse_power_sum: omitted.iter().map(|(w, m)| *m as f64 * w.norm().powi(-q)).sum(),
                    min_modulus: omitted.iter().map(|w| w.0.norm()).fold(f64::INFINITY, f64::min),
                };
                (kept, tail)
            }
        } else {
            let kept = z.nearest(k);
            let g = z.generator().expect("infinite distributions are generator-backed");
            let from = kept.last().map_or(0.0, |w| w.0.norm());
            (
                kept,
                TailModel::Density {
                    constant: g.density_constant(),
                    exponent: g.density_exponent(),
                    from,
                },
            )
        };
        Ok(Self { genus: p, zeros, tail })
    }

    pub fn zeros(&self) -> &[(Complex64, u32)] {
        &self.zeros
    }

    /// Complex logarithm `Σ mult · ln E_p(z/z_j)`, `None` inside the guard
    /// radius of a retained zero.
    pub fn log(&self, z: Complex64, exec: Execution) -> Option<Complex64> {
        if self.zeros.iter().any(|w| (w.0 - z).norm() <= GUARD_RADIUS) {
            return None;
        }
        let n = self.zeros.len();
        let re = exec.block_sum(n, 1024, |range| {
            let mut acc = 0.0;
            for &(w, m) in &self.zeros[range] {
                acc += m as f64 * log_primary_factor(z / w, self.genus).re;
            }
            acc
        });
        let im = exec.block_sum(n, 1024, |range| {
            let mut acc = 0.0;
            for &(w, m) in &self.zeros[range] {
                acc += m as f64 * log_primary_factor(z / w, self.genus).im;
            }
            acc
        });
        Some(Complex64::new(re, im))
    }

    pub fn log_abs(&self, z: Complex64, exec: Execution) -> ProductValue {
        let tail_bound = self.tail_bound(z);
        match self.zeros.iter().any(|w| (w.0 - z).norm() <= GUARD_RADIUS) {
            true => ProductValue {
                value: Extended::NegInfinity,
                tail_bound,
            },
            false => {
                let n = self.zeros.len();
                let v = exec.block_sum(n, 1024, |range| {
                    let mut acc = 0.0;
                    for &(w, m) in &self.zeros[range] {
                        acc += m as f64 * log_abs_primary_factor(z / w, self.genus);
                    }
                    acc
                });
                ProductValue {
                    value: Extended::Finite(v),
                    tail_bound,
                }
            }
        }
    }

    /// `Σ_omitted 2|z/z_j|^(p+1)/(p+1)`, valid while every `|z/z_j| <= 1/2`;
    /// `+inf` otherwise.
    pub fn tail_bound(&self, z: Complex64) -> f64 {
        let q = self.genus as f64 + 1.0;
        let scale = 2.0 / q;
        match &self.tail {
            TailModel::None => 0.0,
            TailModel::Finite {
                inverse_power_sum,
                min_modulus,
            } => {
                if z.norm() / min_modulus > 0.5 {
                    return f64::INFINITY;
                }
                scale * z.norm().powf(q) * inverse_power_sum
            }
            TailModel::Density {
                constant,
                exponent,
                from,
            } => {
                if *from == 0.0 || z.norm() / from > 0.5 || q <= *exponent {
                    return f64::INFINITY;
                }
                // Σ_{|z_j| >= R} |z_j|^-q from n(s) ≈ A s^λ, with 10% slack on
                // the count and the points up to R discounted at 90%.
                let (a, l, r) = (*constant, *exponent, *from);
                let sum = a * r.powf(l - q) * (1.1 * q / (q - l) - 0.9);
                scale * z.norm().powf(q) * sum.max(0.0)
            }
        }
    }

    /// Winding number of `f` along `|w - center| = radius`, i.e. the number
    /// of retained zeros inside.
    pub fn winding_number(&self, center: Complex64, radius: f64, steps: usize, exec: Execution) -> Result<i64> {
        let mut total = 0.0;
        let mut prev: Option<f64> = None;
        for k in 0..=steps {
            let w = center + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / steps as f64);
            let arg = self
                .log(w, exec)
                .ok_or_else(|| Error::Precondition(format!("winding contour passes through a zero at {w}")))?
                .im;
            if let Some(p) = prev {
                let mut d = arg - p;
                d -= std::f64::consts::TAU * (d / std::f64::consts::TAU).round();
                total += d;
            }
            prev = Some(arg);
        }
        Ok((total / std::f64::consts::TAU).round() as i64)
    }
}

/// `ln|f(z)|` for the canonical product of genus `p` over `Z`.
pub fn weierstrass_log_abs(
    z: &ZeroDistribution,
    p: u32,
    at: Complex64,
    per_class: Option<usize>,
) -> Result<ProductValue> {
    Ok(ProductRepresentation::new(z, p, per_class)?.log_abs(at, Execution::default()))
}

/// Domain type for the remainder term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainKind {
    Plane,
    /// Simply connected proper domain (a disk).
    Disk,
    /// Any other proper domain, with the exponent `a > 0`.
    General { a: f64 },
}

/// `R(z)`: 0 on the plane, `ln(1/r(z))` on a disk, and
/// `ln(1/r(z)) + (1 + a) ln(1 + |z|)` otherwise.
pub fn remainder_r(domain: DomainKind, rp: &RadiusProfile, z: Complex64) -> Result<f64> {
    match domain {
        DomainKind::Plane => Ok(0.0),
        DomainKind::Disk => Ok(-radius(rp, z)?.ln()),
        DomainKind::General { a } => {
            if !(a > 0.0) {
                return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
            }
            Ok(-radius(rp, z)?.ln() + (1.0 + a) * z.norm().ln_1p())
        }
    }
}

/// Polar sample grid `|z| <= r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SufficiencyGrid {
    pub r_max: f64,
    #[serde(default = "default_rings")]
    pub rings: usize,
    #[serde(default = "default_spokes")]
    pub spokes: usize,
}

fn default_rings() -> usize {
    24
}

fn default_spokes() -> usize {
    32
}

impl SufficiencyGrid {
    pub fn new(r_max: f64) -> Self {
        Self {
            r_max,
            rings: default_rings(),
            spokes: default_spokes(),
        }
    }

    /// Points on rings `r_max (i + 1/2) / rings`, with angles offset off the
    /// coordinate axes.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rings * self.spokes);
        for i in 0..self.rings {
            let r = self.r_max * (i as f64 + 0.5) / self.rings as f64;
            for k in 0..self.spokes {
                let theta = std::f64::consts::TAU * (k as f64 + 0.1 + 0.37 * (i % 3) as f64) / self.spokes as f64;
                out.push(Complex64::from_polar(r, theta));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificationStatus {
    Certified,
    CertificationFailed,
    /// The necessary condition is violated; the grid is evaluated for the
    /// record but no certificate is issued.
    Refused,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyRow {
    pub re: f64,
    pub im: f64,
    pub log_abs_f: f64,
    pub bound_rhs: f64,
    /// `max(0, ln|f| - rhs)` after balancing.
    pub excess: f64,
    /// Tail bound plus quadrature error.
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Balancing {
    pub degree: u32,
    /// Complex coefficients `(re, im)` of `Q`, ascending; `f` is multiplied by
    /// `exp(Q)`.
    pub coeffs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub status: CertificationStatus,
    pub genus: u32,
    pub retained_zeros: usize,
    pub rows: Vec<SufficiencyRow>,
    pub violations: Vec<(f64, f64, f64)>,
    pub max_excess: f64,
    pub skipped_guard: usize,
    pub balancing: Option<Balancing>,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficiencyOptions {
    pub domain: DomainKind,
    pub tol: f64,
    pub per_class: Option<usize>,
    pub genus: Option<u32>,
    /// Verdict of the necessary-condition sweep on the same pair, if known.
    pub necessary: Option<Verdict>,
    pub exec: Execution,
}

impl Default for SufficiencyOptions {
    fn default() -> Self {
        Self {
            domain: DomainKind::Plane,
            tol: 1e-8,
            per_class: None,
            genus: None,
            necessary: None,
            exec: Execution::default(),
        }
    }
}

/// Fraction of grid points allowed to violate the bound.
const VIOLATION_FRACTION: f64 = 1e-3;

/// Builds `f = f_Z` (times `exp(Q)` when needed) and checks
/// `ln|f| <= M_up^{⊙r̂} - M_low + R` on the grid.
pub fn verify_sufficiency(
    z: &ZeroDistribution,
    m: &DSubharmonicMajorant,
    rp: &RadiusProfile,
    grid: &SufficiencyGrid,
    opts: &SufficiencyOptions,
) -> Result<SufficiencyReport> {
    let p = match opts.genus {
        Some(p) => p,
        None => genus(z, None)?,
    };
    let product = ProductRepresentation::new(z, p, opts.per_class)?;
    let points = grid.points();

    struct Cell {
        z: Complex64,
        log_f: f64,
        rhs: f64,
        budget: f64,
    }
    let evaluated: Vec<Result<Option<Cell>>> = opts.exec.map(&points, |&w| {
        let f = product.log_abs(w, Execution::Sequential);
        let log_f = match f.value {
            Extended::Finite(v) => v,
            _ => return Ok(None),
        };
        let r_hat = hat_radius(rp, w)?;
        let mean = circle_mean(&m.up, w, r_hat, opts.tol)?;
        let rhs = match m.low.eval(w) {
            Extended::NegInfinity => f64::INFINITY,
            low => mean.value - low.to_f64() + remainder_r(opts.domain, rp, w)?,
        };
        Ok(Some(Cell {
            z: w,
            log_f,
            rhs,
            budget: f.tail_bound + mean.error,
        }))
    });
    let mut cells = Vec::new();
    let mut skipped_guard = 0;
    for c in evaluated {
        match c? {
            Some(c) => cells.push(c),
            None => skipped_guard += 1,
        }
    }

    // Raw deficit: positive where the bound fails.
    let deficit: Vec<f64> = cells.iter().map(|c| c.log_f + c.budget - c.rhs).collect();
    let mut balancing = None;
    let mut note = String::new();
    let mut shift: Vec<f64> = vec![0.0; cells.len()];
    if deficit.iter().any(|&d| d > 0.0) {
        match balance(grid, &cells.iter().map(|c| c.z).collect::<Vec<_>>(), &deficit, p) {
            Some((b, values)) => {
                shift = values;
                note = format!("balanced by exp(Q) with deg Q = {}", b.degree);
                balancing = Some(b);
            }
            None => note = "bound fails with growth towards the grid edge; no balancing factor".into(),
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    let mut violations = Vec::new();
    let mut max_excess: f64 = 0.0;
    for (c, s) in cells.iter().zip(&shift) {
        let log_f = c.log_f + s;
        let over = log_f + c.budget - c.rhs;
        let excess = (log_f - c.rhs).max(0.0);
        max_excess = max_excess.max(excess);
        if over > 0.0 {
            violations.push((c.z.re, c.z.im, over));
        }
        rows.push(SufficiencyRow {
            re: c.z.re,
            im: c.z.im,
            log_abs_f: log_f,
            bound_rhs: c.rhs,
            excess,
            budget: c.budget,
        });
    }
    let allowed = (VIOLATION_FRACTION * rows.len() as f64).floor() as usize;
    let status = if opts.necessary == Some(Verdict::Violated) {
        if note.is_empty() {
            note = "necessary condition violated; certification refused".into();
        } else {
            note.push_str("; necessary condition violated, certification refused");
        }
        CertificationStatus::Refused
    } else if violations.len() <= allowed {
        CertificationStatus::Certified
    } else {
        CertificationStatus::CertificationFailed
    };
    Ok(SufficiencyReport {
        status,
        genus: p,
        retained_zeros: product.zeros().len(),
        rows,
        violations,
        max_excess,
        skipped_guard,
        balancing,
        note,
    })
}

/// Finds `Re Q` (deg Q <= max_degree) with `deficit + Re Q <= 0` on the grid:
/// least squares of `Re Q ≈ -deficit` on the violation set, then a constant
/// shift. Refused when the deficit grows over the outer dyadic shells, since
/// no bounded correction then persists beyond the grid.
fn balance(
    grid: &SufficiencyGrid,
    points: &[Complex64],
    deficit: &[f64],
    max_degree: u32,
) -> Option<(Balancing, Vec<f64>)> {
    if !shell_maxima_non_increasing(grid, points, deficit) {
        return None;
    }
    let bad: Vec<usize> = (0..points.len()).filter(|&i| deficit[i] > 0.0).collect();
    let mut best: Option<(Balancing, Vec<f64>, f64)> = None;
    for degree in 0..=max_degree {
        // Real unknowns: c_0 real, then (a_k, b_k) with Re((a_k + i b_k) z^k).
        let features = |w: Complex64| {
            let mut f = vec![1.0];
            let mut pw = Complex64::new(1.0, 0.0);
            for _ in 1..=degree {
                pw *= w;
                f.push(pw.re);
                f.push(-pw.im);
            }
            f
        };
        let n = 1 + 2 * degree as usize;
        if bad.len() < n {
            continue;
        }
        let mut ata = vec![vec![0.0; n]; n];
        let mut atb = vec![0.0; n];
        for &i in &bad {
            let f = features(points[i]);
            for r in 0..n {
                for c in 0..n {
                    ata[r][c] += f[r] * f[c];
                }
                atb[r] -= f[r] * deficit[i];
            }
        }
        let beta = solve(ata, atb)?;
        let mut values: Vec<f64> = points
            .iter()
            .map(|&w| features(w).iter().zip(&beta).map(|(a, b)| a * b).sum())
            .collect();
        let worst = (0..points.len())
            .map(|i| deficit[i] + values[i])
            .fold(f64::NEG_INFINITY, f64::max);
        values.iter_mut().for_each(|v| *v -= worst.max(0.0));
        let mut coeffs = vec![(beta[0] - worst.max(0.0), 0.0)];
        for k in 0..degree as usize {
            coeffs.push((beta[1 + 2 * k], beta[2 + 2 * k]));
        }
        let cost: f64 = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if best.as_ref().map_or(true, |b| cost < b.2) {
            best = Some((Balancing { degree, coeffs }, values, cost));
        }
    }
    let (b, values, _) = best?;
    // The balanced deficit must still not grow outward.
    let balanced: Vec<f64> = deficit.iter().zip(&values).map(|(d, v)| d + v).collect();
    if !shell_maxima_non_increasing(grid, points, &balanced) {
        return None;
    }
    Some((b, values))
}

fn shell_maxima_non_increasing(grid: &SufficiencyGrid, points: &[Complex64], values: &[f64]) -> bool {
    let mut shells: Vec<(f64, f64)> = Vec::new();
    let mut hi = grid.r_max;
    while hi > grid.r_max / 16.0 {
        shells.push((hi / 2.0, hi));
        hi /= 2.0;
    }
    shells.reverse();
    let maxima: Vec<f64> = shells
        .iter()
        .map(|&(lo, hi)| {
            points
                .iter()
                .zip(values)
                .filter(|(w, _)| w.norm() > lo && w.norm() <= hi)
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .filter(|v| v.is_finite())
        .collect();
    maxima.windows(2).all(|w| w[1] <= w[0].max(0.0) + 1e-9 * w[0].abs().max(1.0))
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        if a[col][col].abs() < 1e-300 {
            return None;
        }
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
