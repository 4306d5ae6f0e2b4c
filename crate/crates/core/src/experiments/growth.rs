//! `ρ(Ωₙ)` against `f` and `F(t) = ∫_C^t f` for iterated-log families.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::cf::CFExpansion;
use crate::error::{Error, Result};
use crate::exact::ln_abs_int;
use crate::renorm::{level_lengths, orbit_matrices, xi_profile, CALIBRATED_RANGE};
use crate::sampling::theta_samples;

/// `f(x) = x·log x⋯log⁽ᵏ⁻²⁾x·(log⁽ᵏ⁻¹⁾x)^{1+ε}`, where `log⁽⁰⁾x = x`.
///
/// With `ε = 0` this is the product of the first `k` iterated logarithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IteratedLog {
    pub k: u32,
    pub epsilon: f64,
    /// Every factor is defined and at least 1 on `[c, ∞)`.
    pub c: f64,
}

/// `exp⁽ᵏ⁻¹⁾(1)`, the point where `log⁽ᵏ⁻¹⁾` reaches 1.
pub fn default_cutoff(k: u32) -> f64 {
    (1..k).fold(1.0, |c, _| f64::exp(c))
}

impl IteratedLog {
    pub fn new(k: u32, epsilon: f64) -> Result<Self> {
        Self::with_cutoff(k, epsilon, default_cutoff(k))
    }

    pub fn with_cutoff(k: u32, epsilon: f64, c: f64) -> Result<Self> {
        if k == 0 || !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "iterated-log family needs k ≥ 1 and ε ≥ 0, got k = {k}, ε = {epsilon}"
            )));
        }
        if c.is_nan() || c < default_cutoff(k) {
            return Err(Error::BelowCutoff {
                x: c,
                cutoff: default_cutoff(k),
            });
        }
        Ok(IteratedLog { k, epsilon, c })
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        match cfg.c {
            Some(c) => Self::with_cutoff(cfg.k, cfg.epsilon, c),
            None => Self::new(cfg.k, cfg.epsilon),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let mut prod = 1.0;
        let mut l = x;
        for i in 0..self.k {
            if i + 1 == self.k {
                prod *= l.powf(1.0 + self.epsilon);
            } else {
                prod *= l;
                l = l.ln();
            }
        }
        prod
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < self.c {
            return Err(Error::BelowCutoff { x, cutoff: self.c });
        }
        Ok(self.eval(x))
    }

    /// `∫_C^t f` by double-exponential quadrature, refined to relative
    /// error `1e-10`.
    #[allow(non_snake_case)]
    pub fn F(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < self.c {
            return Err(Error::BelowCutoff { x: t, cutoff: self.c });
        }
        if t == self.c {
            return Ok(0.0);
        }
        let f = |x: f64| self.eval(x.max(self.c));
        let rough = quadrature::integrate(f, self.c, t, 1e-6).integral;
        let fine = quadrature::integrate(f, self.c, t, 1e-10 * rough.abs().max(1e-300));
        Ok(fine.integral)
    }

    pub fn summable(&self) -> bool {
        // ∫ 1/f < ∞ exactly when the last log carries a positive power
        self.epsilon > 0.0
    }
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub sample: usize,
    pub n: usize,
    #[serde(with = "crate::serde_big")]
    pub rho_omega: BigInt,
    #[serde(with = "crate::serde_big")]
    pub halfsum: BigInt,
    pub f_of_n: f64,
    pub F_of_n: f64,
    #[serde(with = "crate::serde_big")]
    pub len_omega: BigInt,
    pub log_len: f64,
    /// `None` when `log|Ωₙ|` is below the cutoff.
    pub f_of_log_len: Option<f64>,
    pub F_of_log_len: Option<f64>,
}

impl GrowthRecord {
    pub fn rho_f64(&self) -> f64 {
        self.rho_omega.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Records for levels `⌈C⌉ ≤ n ≤ depth` of one `θ`.
pub fn growth_records(
    theta: &CFExpansion,
    depth: usize,
    family: &IteratedLog,
    sample: usize,
) -> Result<Vec<GrowthRecord>> {
    let first = (family.c.ceil() as usize).max(1);
    if first > depth {
        return Err(Error::BelowCutoff {
            x: depth as f64,
            cutoff: family.c,
        });
    }
    let xi = xi_profile(theta, depth, CALIBRATED_RANGE)?;
    let lens = level_lengths(&orbit_matrices(theta, depth)?);
    (first..=depth)
        .map(|n| {
            let nf = n as f64;
            let log_len = ln_abs_int(&lens[n][0]);
            let (f_ll, big_f_ll) = if log_len >= family.c {
                (Some(family.f(log_len)?), Some(family.F(log_len)?))
            } else {
                (None, None)
            };
            Ok(GrowthRecord {
                sample,
                n,
                rho_omega: xi[n].rho.clone(),
                halfsum: xi[n].halfsum.clone(),
                f_of_n: family.f(nf)?,
                F_of_n: family.F(nf)?,
                len_omega: lens[n][0].clone(),
                log_len,
                f_of_log_len: f_ll,
                F_of_log_len: big_f_ll,
            })
        })
        .collect()
}

/// The configured `θ`, or `cfg.samples` seeded draws deep enough for
/// `cfg.depth` gap steps.
pub fn experiment_thetas(cfg: &ExperimentConfig, depth: usize) -> Result<Vec<CFExpansion>> {
    match cfg.theta()? {
        Some(th) => Ok(vec![th]),
        None => {
            if cfg.samples == 0 {
                return Err(Error::InvalidArgument("samples must be positive".into()));
            }
            Ok(theta_samples(cfg.seed, cfg.samples, 2 * depth + 3))
        }
    }
}

pub fn run_growth_experiment(cfg: &ExperimentConfig, family: &IteratedLog) -> Result<Vec<GrowthRecord>> {
    let mut out = Vec::new();
    for (i, th) in experiment_thetas(cfg, cfg.depth)?.iter().enumerate() {
        out.extend(growth_records(th, cfg.depth, family, i)?);
    }
    Ok(out)
}

/// Per-sample maxima of `ρ(Ωₙ)/f(n)` and `ρ(Ωₙ)/F(n)`.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    pub sample: usize,
    pub max_rho_over_f: f64,
    /// Over levels with `F(n) > 0`.
    pub max_rho_over_F: f64,
    /// `ρ/F` over the second half of the levels never beats its maximum over
    /// the first half.
    pub F_ratio_settled: bool,
}

pub fn summarize_growth(records: &[GrowthRecord]) -> Vec<GrowthSummary> {
    let mut ids: Vec<usize> = records.iter().map(|r| r.sample).collect();
    ids.dedup();
    ids.into_iter()
        .map(|id| {
            let rows: Vec<&GrowthRecord> = records.iter().filter(|r| r.sample == id).collect();
            let f_ratio = |r: &&GrowthRecord| r.rho_f64() / r.f_of_n;
            let big_f_ratio = |r: &&GrowthRecord| {
                if r.F_of_n > 0.0 {
                    r.rho_f64() / r.F_of_n
                } else {
                    0.0
                }
            };
            let half = rows.len() / 2;
            let early = rows[..half].iter().map(big_f_ratio).fold(0.0, f64::max);
            let late = rows[half..].iter().map(big_f_ratio).fold(0.0, f64::max);
            GrowthSummary {
                sample: id,
                max_rho_over_f: rows.iter().map(f_ratio).fold(0.0, f64::max),
                max_rho_over_F: early.max(late),
                F_ratio_settled: late <= early,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoffs() {
        assert_eq!(default_cutoff(1), 1.0);
        assert_eq!(default_cutoff(2), std::f64::consts::E);
        assert!((default_cutoff(3) - std::f64::consts::E.exp()).abs() < 1e-12);
        let f = IteratedLog::new(2, 0.0).unwrap();
        assert!(matches!(f.f(2.0), Err(Error::BelowCutoff { .. })));
        assert!(IteratedLog::with_cutoff(2, 0.0, 2.0).is_err());
    }

    #[test]
    fn closed_forms() {
        let lin = IteratedLog::with_cutoff(1, 0.0, 3.0).unwrap();
        for t in [3.5, 10.0, 400.0] {
            assert_eq!(lin.f(t).unwrap(), t);
            let exact = (t * t - 9.0) / 2.0;
            assert!((lin.F(t).unwrap() - exact).abs() <= 1e-8 * exact);
        }
        let xlogx = IteratedLog::new(2, 0.0).unwrap();
        let prim = |x: f64| x * x * x.ln() / 2.0 - x * x / 4.0;
        for t in [3.0, 30.0, 1e4] {
            let exact = prim(t) - prim(xlogx.c);
            assert!((xlogx.F(t).unwrap() - exact).abs() <= 1e-8 * exact);
        }
        let sq = IteratedLog::new(2, 1.0).unwrap();
        assert!((sq.f(100.0).unwrap() - 100.0 * 100f64.ln().powi(2)).abs() < 1e-9);
        assert!(sq.summable() && !xlogx.summable());
    }

    #[test]
    fn records_follow_the_renormalization() {
        let th = CFExpansion::periodic(&[], &[2]).unwrap();
        let fam = IteratedLog::new(1, 0.0).unwrap();
        let r = growth_records(&th, 6, &fam, 0).unwrap();
        assert_eq!(r.len(), 6);
        assert_eq!(r[0].len_omega, BigInt::from(5));
        assert_eq!(r[0].rho_omega, BigInt::from(2));
        assert_eq!(r[0].F_of_n, 0.0);
        // every level adds E(2)/2 = 1 to the half-sum
        assert!(r.iter().all(|x| x.halfsum == BigInt::from(x.n)));
        let s = summarize_growth(&r);
        assert_eq!(s.len(), 1);
    }
}
