//! Execution strategy for the data-parallel sweeps.
//!
//! With the `parallel` feature the sweeps fan out over rayon; without it, or
//! with [`Execution::Sequential`], they run on the calling thread. Results are
//! always assembled in input order and block sums are reduced pairwise in a
//! fixed tree, so both strategies produce bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// Sum `f(start..end)` over consecutive blocks of `block` indices in `0..n`.
    pub fn block_sum<F>(self, n: usize, block: usize, f: F) -> f64
    where
        F: Fn(std::ops::Range<usize>) -> f64 + Sync + Send,
    {
        let block = block.max(1);
        let ranges: Vec<_> = (0..n)
            .step_by(block)
            .map(|s| s..(s + block).min(n))
            .collect();
        let partials = self.map(&ranges, |r| f(r.clone()));
        pairwise_sum(&partials)
    }
}

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_bitwise() {
        let f = |r: std::ops::Range<usize>| r.map(|i| 1.0 / (1.0 + i as f64).powi(2)).sum::<f64>();
        let seq = Execution::Sequential.block_sum(100_003, 997, f);
        let def = Execution::default().block_sum(100_003, 997, f);
        assert_eq!(seq.to_bits(), def.to_bits());
    }

    #[test]
    fn map_preserves_order() {
        let v: Vec<u32> = (0..1000).collect();
        let out = Execution::default().map(&v, |x| x * 2);
        assert!(out.iter().enumerate().all(|(i, &x)| x == 2 * i as u32));
    }
}
