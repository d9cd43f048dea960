//! Complex polynomials: evaluation and roots with multiplicities.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("polynomial is identically zero".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("polynomial coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    /// `lead · Π (z - root)^mult`.
    pub fn from_roots(lead: Complex64, roots: &[(Complex64, u32)]) -> Result<Self> {
        let mut coeffs = vec![lead];
        for &(r, m) in roots {
            for _ in 0..m {
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * r;
                }
                coeffs = next;
            }
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().expect("non-empty coefficients")
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.coeffs
            .iter()
            .rev()
            .fold((zero, zero), |(p, dp), c| (p * z + c, dp * z + p))
    }

    /// Roots grouped by multiplicity. Aberth–Ehrlich iteration, then clusters
    /// of nearby roots are merged and replaced by their centroid, which is
    /// accurate to first order for a perturbed multiple root.
    pub fn roots(&self) -> Vec<(Complex64, u32)> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let bound = 1.0
            + self.coeffs[..n]
                .iter()
                .map(|c| (c / lead).norm())
                .fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(0.5 * bound, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let (p, dp) = self.eval_with_derivative(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let d = z[i] - z[j];
                        if d.norm() == 0.0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            d.inv()
                        }
                    })
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if step.re.is_finite() && step.im.is_finite() {
                    z[i] -= step;
                    moved = moved.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        cluster(z, 1e-4 * bound)
    }
}

fn cluster(mut roots: Vec<Complex64>, radius: f64) -> Vec<(Complex64, u32)> {
    let mut out = Vec::new();
    while let Some(seed) = roots.pop() {
        let (near, far): (Vec<_>, Vec<_>) = roots.into_iter().partition(|r| (r - seed).norm() <= radius);
        let m = near.len() + 1;
        let centroid = (near.iter().sum::<Complex64>() + seed) / m as f64;
        out.push((centroid, m as u32));
        roots = far;
    }
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(Polynomial::new(vec![]).is_err());
    }

    #[test]
    fn multiple_root_recovered() {
        let q = Polynomial::from_roots(c(1.0, 0.0), &[(c(1.0, 0.0), 2), (c(0.0, -1.0), 1)]).unwrap();
        let roots = q.roots();
        assert_eq!(roots.len(), 2);
        let one = roots.iter().find(|r| r.1 == 2).unwrap();
        let mi = roots.iter().find(|r| r.1 == 1).unwrap();
        assert!((one.0 - c(1.0, 0.0)).norm() < 1e-7);
        assert!((mi.0 - c(0.0, -1.0)).norm() < 1e-10);
    }

    #[test]
    fn simple_roots_to_high_accuracy() {
        let roots = [(c(0.3, 1.1), 1), (c(-1.7, 0.2), 1), (c(1.9, -0.4), 1), (c(0.0, -1.5), 1), (c(-0.6, -0.6), 1)];
        let q = Polynomial::from_roots(c(2.0, 1.0), &roots).unwrap();
        let found = q.roots();
        assert_eq!(found.len(), 5);
        for (r, _) in roots {
            let best = found.iter().map(|f| (f.0 - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "{r}: {best}");
        }
        assert!((q.eval(c(0.3, 1.1))).norm() < 1e-12);
    }
}
