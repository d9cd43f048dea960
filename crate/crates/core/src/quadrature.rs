//! Globally adaptive 10/21-point Gauss–Kronrod integration on intervals.
//!
//! The integrator bisects the panel with the largest error estimate until the
//! summed estimate drops below the requested tolerance. Breakpoints split the
//! initial interval so integrable endpoint singularities (logarithms, power
//! laws) are never sampled directly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_426,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

/// Result of a quadrature with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Quadrature {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: 0.0,
            evaluations: 0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.abs(),
            evaluations: self.evaluations,
        }
    }

    pub fn add(self, other: Quadrature) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// Tolerance settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self {
            abs,
            rel: 0.0,
            max_panels: 4000,
        }
    }

    pub fn with_rel(mut self, rel: f64) -> Self {
        self.rel = rel;
        self
    }

    pub fn with_max_panels(mut self, n: usize) -> Self {
        self.max_panels = n;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resabs = WGK[10] * fc.abs();
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resabs += WGK[j] * (fv1[j].abs() + fv2[j].abs());
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let h = half.abs();
    let value = resk * half;
    resabs *= h;
    resasc *= h;
    let mut error = ((resk - resg) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Panel {
            a,
            b,
            value: f64::NAN,
            error: f64::INFINITY,
            resabs: f64::INFINITY,
        };
    }
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel {
        a,
        b,
        value,
        error,
        resabs,
    }
}

/// Integrate `f` over `[a, b]`, splitting first at every breakpoint inside the
/// interval.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature::exact(0.0));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > lo && x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (hi - lo));

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut left = lo;
    for &c in cuts.iter().chain(std::iter::once(&hi)) {
        if c - left > 0.0 {
            heap.push(kronrod21(&mut f, left, c));
            evaluations += 21;
        }
        left = c;
    }

    let min_width = 1e-14 * (hi - lo).max(1e-300);
    loop {
        let (value, error) = totals(&heap);
        let target = tol.abs.max(tol.rel * value.abs());
        if value.is_finite() && error <= target {
            return Ok(Quadrature {
                value: sign * value,
                error,
                evaluations,
            });
        }
        // Stop refining once every panel sits at its roundoff floor.
        if value.is_finite() && heap.iter().all(|p| p.error <= 50.0 * f64::EPSILON * p.resabs * 1.0001) {
            return Ok(Quadrature {
                value: sign * value,
                error,
                evaluations,
            });
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::Tolerance {
                estimate: sign * value,
                residual: error,
            });
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if worst.b - worst.a <= min_width {
            let (value, error) = totals(&heap);
            return Err(Error::Tolerance {
                estimate: sign * (value + worst.value),
                residual: error + worst.error,
            });
        }
        heap.push(kronrod21(&mut f, worst.a, mid));
        heap.push(kronrod21(&mut f, mid, worst.b));
        evaluations += 42;
    }
}

/// [`integrate`] for fallible integrands. The first error aborts the
/// quadrature (remaining samples evaluate to zero) and is returned.
pub fn try_integrate<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Quadrature> {
    let mut failure: Option<Error> = None;
    let q = integrate(
        |x| {
            if failure.is_some() {
                return 0.0;
            }
            match f(x) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        a,
        b,
        breakpoints,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => q,
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    heap.iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// Fixed-order Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &[], Tolerance::absolute(1e-13)).unwrap();
        assert!((q.value - (63.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn log_endpoint_singularity() {
        let q = integrate(|x: f64| x.ln(), 0.0, 1.0, &[], Tolerance::absolute(1e-12)).unwrap();
        assert!((q.value + 1.0).abs() < 1e-11, "{q:?}");
    }

    #[test]
    fn interior_breakpoint_for_kink() {
        let q = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], Tolerance::absolute(1e-14)).unwrap();
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
        assert_eq!(q.evaluations, 42);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let q = integrate(|x: f64| x.exp(), 1.0, 0.0, &[], Tolerance::absolute(1e-13)).unwrap();
        assert!((q.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn divergent_integral_reports_residual() {
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, &[], Tolerance::absolute(1e-10).with_max_panels(200))
            .unwrap_err();
        assert!(matches!(err, Error::Tolerance { .. }));
    }

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
