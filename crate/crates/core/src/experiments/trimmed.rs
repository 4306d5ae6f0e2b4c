//! Trimmed half-sums `½ΣE(a₁(θᵢ)) − ½max E(a₁(θᵢ))` against `n log n`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::growth::experiment_thetas;
use crate::cf::{parity_floor, CFExpansion};
use crate::error::{Error, Result};
use crate::trajectory::GapOrbit;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrimmedRecord {
    pub sample: usize,
    pub n: usize,
    #[serde(with = "crate::serde_big")]
    pub halfsum: BigInt,
    pub halfmax: u64,
    #[serde(with = "crate::serde_big")]
    pub trimmed: BigInt,
    /// `trimmed / (n log n)`.
    pub ratio: f64,
    /// `halfsum / (n log n)`.
    pub untrimmed_ratio: f64,
}

/// Rows at each checkpoint `n ≥ 2` for one `θ`.
pub fn trimmed_records(theta: &CFExpansion, checkpoints: &[usize], sample: usize) -> Result<Vec<TrimmedRecord>> {
    let n_max = checkpoints.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    let mut sum = BigInt::from(0);
    let mut max = 0u64;
    for (i, q) in GapOrbit::new(theta).take(n_max).enumerate() {
        let e = parity_floor(q?.a1);
        sum += e;
        max = max.max(e);
        let n = i + 1;
        if n >= 2 && checkpoints.contains(&n) {
            let halfsum = &sum / 2u32;
            let trimmed = &halfsum - max / 2;
            let scale = n as f64 * (n as f64).ln();
            out.push(TrimmedRecord {
                sample,
                n,
                ratio: trimmed.to_f64().unwrap_or(f64::INFINITY) / scale,
                untrimmed_ratio: halfsum.to_f64().unwrap_or(f64::INFINITY) / scale,
                halfsum,
                halfmax: max / 2,
                trimmed,
            });
        }
    }
    Ok(out)
}

fn default_checkpoints(depth: usize) -> Vec<usize> {
    let mut c: Vec<usize> = [8, 4, 2, 1].iter().map(|d| depth / d).filter(|&n| n >= 2).collect();
    c.dedup();
    c
}

/// Needs `samples ≥ 30` and `depth ≥ 200` unless a fixed `θ` is given.
pub fn run_trimmed_sums(cfg: &ExperimentConfig) -> Result<Vec<TrimmedRecord>> {
    let fixed = cfg.theta_spec.is_some();
    if !fixed && (cfg.samples < 30 || cfg.depth < 200) {
        return Err(Error::InvalidArgument(format!(
            "trimmed sums need samples ≥ 30 and depth ≥ 200, got {} and {}",
            cfg.samples, cfg.depth
        )));
    }
    let checkpoints = if cfg.checkpoints.is_empty() {
        default_checkpoints(cfg.depth)
    } else {
        cfg.checkpoints.clone()
    };
    let mut out = Vec::new();
    for (i, th) in experiment_thetas(cfg, cfg.depth)?.iter().enumerate() {
        out.extend(trimmed_records(th, &checkpoints, i)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrimmedSummary {
    pub n: usize,
    pub median_ratio: f64,
    pub median_untrimmed_ratio: f64,
}

/// Medians across samples at each checkpoint, ascending in `n`.
pub fn summarize_trimmed(records: &[TrimmedRecord]) -> Vec<TrimmedSummary> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let med = |xs: Vec<f64>| {
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
        let m = xs.len() / 2;
        if xs.len() % 2 == 1 {
            xs[idx[m]]
        } else {
            (xs[idx[m - 1]] + xs[idx[m]]) / 2.0
        }
    };
    ns.into_iter()
        .map(|n| {
            let rows: Vec<&TrimmedRecord> = records.iter().filter(|r| r.n == n).collect();
            TrimmedSummary {
                n,
                median_ratio: med(rows.iter().map(|r| r.ratio).collect()),
                median_untrimmed_ratio: med(rows.iter().map(|r| r.untrimmed_ratio).collect()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimming_removes_one_huge_quotient() {
        let th = CFExpansion::periodic(&[1_000_000, 3], &[4]).unwrap();
        let r = trimmed_records(&th, &[10], 0).unwrap();
        assert_eq!(r[0].halfmax, 500_000);
        assert!(r[0].untrimmed_ratio > 1e4);
        assert!(r[0].ratio < 1.0);
    }

    #[test]
    fn silver_trimmed_sum_is_linear() {
        let th = CFExpansion::periodic(&[], &[2]).unwrap();
        let r = trimmed_records(&th, &[10, 100, 1000], 0).unwrap();
        for row in &r {
            assert_eq!(row.trimmed, BigInt::from(row.n - 1));
        }
        assert!(r[2].ratio < r[1].ratio && r[1].ratio < r[0].ratio);
    }

    #[test]
    fn sample_size_is_enforced() {
        let cfg = ExperimentConfig {
            samples: 10,
            depth: 200,
            ..Default::default()
        };
        assert!(run_trimmed_sums(&cfg).is_err());
    }
}
