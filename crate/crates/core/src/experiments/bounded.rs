//! `ρ_N(x)/log N` for `θ` with bounded partial quotients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::cf::CFExpansion;
use crate::error::{Error, Result};
use crate::exact::{ln_abs_int, ExactReal};
use crate::orbit::rho_checkpoints;
use crate::renorm::{level_lengths, orbit_matrices, xi_profile, CALIBRATED_RANGE};

pub const DEFAULT_THETA: &str = "cfper:[][2]";
pub const DEFAULT_POINTS: [&str; 4] = ["0/1", "1/3", "2/7", "5/11"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedPqRecord {
    pub x: String,
    pub n: usize,
    pub rho: u64,
    /// `ρ_N / log N`.
    pub ratio: f64,
}

/// Orbit lengths `10³ … n_max`, four per decade.
pub fn log_checkpoints(n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let n = (1000.0 * 10f64.powf(i as f64 / 4.0)).round() as usize;
        if n > n_max {
            break;
        }
        out.push(n);
        i += 1;
    }
    out
}

fn parse_point(s: &str) -> Result<ExactReal> {
    let bad = || Error::InvalidArgument(format!("starting point must be p/q, got {s:?}"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(Error::DivisionByZero);
    }
    Ok(ExactReal::from_rational(BigRational::new(p, q)))
}

/// Quotients are bounded when `θ` is eventually periodic; the orbit code
/// further needs `θ < 1/2`.
fn check_theta(theta: &CFExpansion) -> Result<()> {
    if theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{} is rational; bounded-quotient checks need an eventually periodic expansion",
            theta.spec()
        )));
    }
    if theta.a1() < 2 {
        return Err(Error::ThetaRange(theta.spec()));
    }
    Ok(())
}

pub fn run_bounded_pq_check(cfg: &ExperimentConfig) -> Result<Vec<BoundedPqRecord>> {
    let theta = match cfg.theta()? {
        Some(t) => t,
        None => DEFAULT_THETA.parse::<crate::cf::ThetaSpec>()?.expansion()?,
    };
    check_theta(&theta)?;
    let checkpoints = if cfg.checkpoints.is_empty() {
        log_checkpoints(cfg.orbit_len)
    } else {
        let mut c = cfg.checkpoints.clone();
        c.sort_unstable();
        c.dedup();
        c
    };
    if checkpoints.first().is_none_or(|&n| n < 2) {
        return Err(Error::InvalidArgument("orbit lengths must be at least 2".into()));
    }
    let points: Vec<String> = if cfg.points.is_empty() {
        DEFAULT_POINTS.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.points.clone()
    };
    let value = theta.value();
    let mut out = Vec::new();
    for p in &points {
        let x = parse_point(p)?;
        let rho = rho_checkpoints(&x, &value, &checkpoints)?;
        out.extend(checkpoints.iter().zip(rho).map(|(&n, r)| BoundedPqRecord {
            x: p.clone(),
            n,
            rho: r,
            ratio: r as f64 / (n as f64).ln(),
        }));
    }
    Ok(out)
}

/// Per-point spread of `ρ_N / log N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedPqSummary {
    pub x: String,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub nondecreasing: bool,
}

impl BoundedPqSummary {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

pub fn summarize_bounded(records: &[BoundedPqRecord]) -> Vec<BoundedPqSummary> {
    let mut out: Vec<BoundedPqSummary> = Vec::new();
    let mut last_rho = 0;
    for r in records {
        if out.last().map(|s| &s.x) != Some(&r.x) {
            out.push(BoundedPqSummary {
                x: r.x.clone(),
                min_ratio: f64::INFINITY,
                max_ratio: 0.0,
                nondecreasing: true,
            });
            last_rho = 0;
        }
        let s = out.last_mut().expect("just pushed");
        s.min_ratio = s.min_ratio.min(r.ratio);
        s.max_ratio = s.max_ratio.max(r.ratio);
        s.nondecreasing &= r.rho >= last_rho;
        last_rho = r.rho;
    }
    out
}

/// Half-sum at level `n` against `log|Ωₙ|`; both grow linearly for periodic
/// `θ`, so the ratio settles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelGrowthRecord {
    pub n: usize,
    #[serde(with = "crate::serde_big")]
    pub halfsum: BigInt,
    pub log_len: f64,
    pub ratio: f64,
}

pub fn level_growth(theta: &CFExpansion, depth: usize) -> Result<Vec<LevelGrowthRecord>> {
    let xi = xi_profile(theta, depth, CALIBRATED_RANGE)?;
    let lens = level_lengths(&orbit_matrices(theta, depth)?);
    Ok((1..=depth)
        .map(|n| {
            let log_len = ln_abs_int(&lens[n][0]);
            let h = xi[n].halfsum.to_f64().unwrap_or(f64::INFINITY);
            LevelGrowthRecord {
                n,
                halfsum: xi[n].halfsum.clone(),
                log_len,
                ratio: h / log_len,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoints_are_log_spaced() {
        assert_eq!(log_checkpoints(10_000), vec![1000, 1778, 3162, 5623, 10_000]);
        assert_eq!(log_checkpoints(1_000_000).len(), 13);
    }

    #[test]
    fn silver_ratio_band() {
        let cfg = ExperimentConfig {
            orbit_len: 100_000,
            ..Default::default()
        };
        let r = run_bounded_pq_check(&cfg).unwrap();
        let s = summarize_bounded(&r);
        assert_eq!(s.len(), DEFAULT_POINTS.len());
        for p in &s {
            assert!(p.nondecreasing);
            assert!(p.spread() <= 3.0, "{p:?}");
        }
    }

    #[test]
    fn silver_levels() {
        let th = CFExpansion::periodic(&[], &[2]).unwrap();
        let rows = level_growth(&th, 40).unwrap();
        // halfsum = n, log|Ωₙ| ≈ n log(3 + 2√2)
        let expect = 1.0 / (3.0 + 2.0 * 2f64.sqrt()).ln();
        assert!((rows[39].ratio - expect).abs() < 0.01);
    }

    #[test]
    fn rejects_unbounded_or_large_theta() {
        let mk = |s: &str| ExperimentConfig {
            theta_spec: Some(s.into()),
            ..Default::default()
        };
        assert!(run_bounded_pq_check(&mk("cf:[2,3,4]")).is_err());
        assert!(run_bounded_pq_check(&mk("cfper:[1][2]")).is_err());
    }
}
