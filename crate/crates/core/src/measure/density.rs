use serde::{Deserialize, Serialize};

use super::ulam::UlamOperator;
use crate::error::{Error, Result};

/// A piecewise-constant density on uniform bins, normalized to mean 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub bins: usize,
    pub values: Vec<f64>,
    /// `‖vP − v‖₁` on bin masses at the returned iterate.
    pub residual: f64,
    pub iterations: usize,
}

/// Left fixed vector of `P` by power iteration from the uniform vector.
pub fn stationary_density(op: &UlamOperator, tol: f64, max_iter: usize) -> Result<DensityEstimate> {
    let n = op.bins;
    let mut v = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut next = op.push_forward(&v);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        residual = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        if residual <= tol {
            return Ok(DensityEstimate {
                bins: n,
                values: v.iter().map(|x| x * n as f64).collect(),
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

impl DensityEstimate {
    /// Bin masses, summing to 1.
    pub fn masses(&self) -> Vec<f64> {
        self.values.iter().map(|f| f / self.bins as f64).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Mass of `[a, b)` under the piecewise-constant density.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        let n = self.bins as f64;
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        if b <= a {
            return 0.0;
        }
        let first = ((a * n).floor() as usize).min(self.bins - 1);
        let last = (((b * n).ceil() as usize).max(1) - 1).min(self.bins - 1);
        (first..=last)
            .map(|i| {
                let lo = a.max(i as f64 / n);
                let hi = b.min((i + 1) as f64 / n);
                self.values[i] * (hi - lo).max(0.0)
            })
            .sum()
    }

    /// `μ̂(1/2, 1)`.
    pub fn mass_upper_half(&self) -> f64 {
        self.values[self.bins / 2..].iter().sum::<f64>() / self.bins as f64
    }

    /// `∫|f − h|` between two estimates on nested grids.
    pub fn l1_distance(&self, other: &DensityEstimate) -> f64 {
        let (coarse, fine) = if self.bins <= other.bins {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = fine.bins / coarse.bins;
        assert_eq!(ratio * coarse.bins, fine.bins, "grids must be nested");
        fine.values
            .iter()
            .enumerate()
            .map(|(i, f)| (f - coarse.values[i / ratio]).abs())
            .sum::<f64>()
            / fine.bins as f64
    }
}

/// `|cov(f, h∘Tⁿ)|` for `n = 0, …, n_max` under the Ulam chain started from
/// its stationary law.
pub fn correlation_decay(f: &[f64], h: &[f64], op: &UlamOperator, density: &DensityEstimate, n_max: usize) -> Vec<f64> {
    let pi = density.masses();
    let mean = |x: &[f64]| x.iter().zip(&pi).map(|(a, p)| a * p).sum::<f64>();
    let (ef, eh) = (mean(f), mean(h));
    let mut w = h.to_vec();
    let mut out = Vec::with_capacity(n_max + 1);
    for step in 0..=n_max {
        let efw: f64 = f.iter().zip(&w).zip(&pi).map(|((a, b), p)| a * b * p).sum();
        out.push((efw - ef * eh).abs());
        if step < n_max {
            w = op.pull_back(&w);
        }
    }
    out
}

/// Indicator of `[a, b)` on the bins, weighted by the covered fraction.
pub fn indicator(bins: usize, a: f64, b: f64) -> Vec<f64> {
    let n = bins as f64;
    (0..bins)
        .map(|i| {
            let lo = a.max(i as f64 / n);
            let hi = b.min((i + 1) as f64 / n);
            ((hi - lo) * n).max(0.0)
        })
        .collect()
}
