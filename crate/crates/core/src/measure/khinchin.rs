//! Exceedances `a₁(gⁿθ) > bₙ` along random gap orbits.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{bits_for_depth, random_theta, sample_rng};
use crate::trajectory::GapOrbit;

/// Threshold sequences `bₙ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdFamily {
    /// `bₙ = n`; `Σ 1/bₙ` diverges.
    Linear,
    /// `bₙ = n (log(n + 2))²`; `Σ 1/bₙ` converges.
    LogSquared,
    /// No exceedances possible.
    Infinite,
}

impl ThresholdFamily {
    pub fn threshold(self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            ThresholdFamily::Linear => x,
            ThresholdFamily::LogSquared => x * (x + 2.0).ln().powi(2),
            ThresholdFamily::Infinite => f64::INFINITY,
        }
    }

    pub fn summable(self) -> bool {
        !matches!(self, ThresholdFamily::Linear)
    }
}

impl fmt::Display for ThresholdFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdFamily::Linear => "linear",
            ThresholdFamily::LogSquared => "log-squared",
            ThresholdFamily::Infinite => "infinite",
        })
    }
}

impl FromStr for ThresholdFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "n" => Ok(ThresholdFamily::Linear),
            "log-squared" | "nlog2" => Ok(ThresholdFamily::LogSquared),
            "infinite" | "inf" => Ok(ThresholdFamily::Infinite),
            _ => Err(Error::InvalidArgument(format!(
                "unknown threshold family {s:?} (linear, log-squared, infinite)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhinchinConfig {
    pub family: ThresholdFamily,
    pub samples: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    /// Window ends at which counts are also recorded, ascending, each in
    /// `[n_min, n_max]`. `n_max` is always added.
    pub checkpoints: Vec<usize>,
}

impl KhinchinConfig {
    pub fn new(family: ThresholdFamily, samples: usize, n_min: usize, n_max: usize, seed: u64) -> Self {
        let checkpoints = [8, 4, 2].iter().map(|d| n_max / d).filter(|&c| c > n_min).collect();
        KhinchinConfig {
            family,
            samples,
            n_min,
            n_max,
            seed,
            checkpoints,
        }
    }

    fn ends(&self) -> Vec<usize> {
        let mut ends: Vec<usize> = self
            .checkpoints
            .iter()
            .copied()
            .filter(|&c| c >= self.n_min && c < self.n_max)
            .collect();
        ends.push(self.n_max);
        ends.sort_unstable();
        ends.dedup();
        ends
    }
}

/// One sample's exceedances over `[n_min, n_max]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleExceedance {
    pub sample_id: usize,
    pub count: usize,
    pub last_index: Option<usize>,
    /// Counts over `[n_min, end]` for each checkpoint end.
    pub counts_at: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhinchinReport {
    pub config: KhinchinConfig,
    pub ends: Vec<usize>,
    pub samples: Vec<SampleExceedance>,
    pub median_count: f64,
    pub median_at: Vec<f64>,
    /// Fraction of samples with more exceedances in the full window than in
    /// the shortest one.
    pub growing_fraction: f64,
}

impl KhinchinReport {
    /// Medians never decrease with the window and end strictly higher.
    pub fn median_increases(&self) -> bool {
        self.median_at.windows(2).all(|w| w[0] <= w[1]) && self.median_at.first() < self.median_at.last()
    }

    /// `sample_id,count,last_index`, with an empty field for no exceedance.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["sample_id", "count", "last_index"]).map_err(io)?;
        for s in &self.samples {
            let last = s.last_index.map(|i| i.to_string()).unwrap_or_default();
            w.write_record([s.sample_id.to_string(), s.count.to_string(), last])
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

pub fn median(xs: &mut [usize]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_unstable();
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m] as f64
    } else {
        (xs[m - 1] + xs[m]) as f64 / 2.0
    }
}

fn run_sample(cfg: &KhinchinConfig, ends: &[usize], id: usize) -> Result<SampleExceedance> {
    // the gap map eats at most two quotients per step
    let depth = 2 * cfg.n_max + 3;
    let theta = random_theta(&mut sample_rng(cfg.seed, id as u64), bits_for_depth(depth), depth);
    let mut count = 0;
    let mut last_index = None;
    let mut counts_at = Vec::with_capacity(ends.len());
    let mut next_end = 0;
    for (n, q) in GapOrbit::new(&theta).take(cfg.n_max + 1).enumerate() {
        let q = q?;
        if n >= cfg.n_min && q.a1 as f64 > cfg.family.threshold(n) {
            count += 1;
            last_index = Some(n);
        }
        if next_end < ends.len() && n == ends[next_end] {
            counts_at.push(count);
            next_end += 1;
        }
    }
    Ok(SampleExceedance {
        sample_id: id,
        count,
        last_index,
        counts_at,
    })
}

/// Samples are independent of the worker count: sample `i` draws from the
/// stream seeded with `seed ^ i`.
pub fn khinchin_experiment(cfg: &KhinchinConfig) -> Result<KhinchinReport> {
    if cfg.samples == 0 || cfg.n_min > cfg.n_max {
        return Err(Error::InvalidArgument(format!(
            "need samples > 0 and n_min ≤ n_max, got {} and [{}, {}]",
            cfg.samples, cfg.n_min, cfg.n_max
        )));
    }
    let ends = cfg.ends();
    let samples = (0..cfg.samples)
        .into_par_iter()
        .map(|i| run_sample(cfg, &ends, i))
        .collect::<Result<Vec<_>>>()?;
    let median_at: Vec<f64> = (0..ends.len())
        .map(|j| median(&mut samples.iter().map(|s| s.counts_at[j]).collect::<Vec<_>>()))
        .collect();
    let growing = samples.iter().filter(|s| s.count > s.counts_at[0]).count();
    Ok(KhinchinReport {
        median_count: *median_at.last().expect("n_max is always an end"),
        growing_fraction: growing as f64 / cfg.samples as f64,
        config: cfg.clone(),
        ends,
        samples,
        median_at,
    })
}
