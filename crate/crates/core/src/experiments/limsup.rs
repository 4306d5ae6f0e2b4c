//! Running maximum of `ρ(Ωₙ)/(n log n)` over levels.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::growth::experiment_thetas;
use crate::cf::CFExpansion;
use crate::error::Result;
use crate::renorm::{xi_profile, CALIBRATED_RANGE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimsupRecord {
    pub sample: usize,
    pub n: usize,
    pub rho_omega: String,
    pub ratio: f64,
    pub running_max: f64,
}

/// Rows for `2 ≤ n ≤ depth`.
pub fn limsup_records(theta: &CFExpansion, depth: usize, sample: usize) -> Result<Vec<LimsupRecord>> {
    let xi = xi_profile(theta, depth, CALIBRATED_RANGE)?;
    let mut best = 0.0f64;
    Ok((2..=depth)
        .map(|n| {
            let nf = n as f64;
            let ratio = xi[n].rho.to_f64().unwrap_or(f64::INFINITY) / (nf * nf.ln());
            best = best.max(ratio);
            LimsupRecord {
                sample,
                n,
                rho_omega: xi[n].rho.to_string(),
                ratio,
                running_max: best,
            }
        })
        .collect())
}

pub fn run_limsup_probe(cfg: &ExperimentConfig) -> Result<Vec<LimsupRecord>> {
    let mut out = Vec::new();
    for (i, th) in experiment_thetas(cfg, cfg.depth)?.iter().enumerate() {
        out.extend(limsup_records(th, cfg.depth, i)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimsupSummary {
    pub sample: usize,
    pub final_max: f64,
    /// The running max went up somewhere in the last third of the levels.
    pub increased_late: bool,
}

pub fn summarize_limsup(records: &[LimsupRecord]) -> Vec<LimsupSummary> {
    let mut ids: Vec<usize> = records.iter().map(|r| r.sample).collect();
    ids.dedup();
    ids.into_iter()
        .map(|id| {
            let rows: Vec<&LimsupRecord> = records.iter().filter(|r| r.sample == id).collect();
            let cut = rows.len() - rows.len() / 3;
            let before = rows[..cut].last().map_or(0.0, |r| r.running_max);
            let final_max = rows.last().map_or(0.0, |r| r.running_max);
            LimsupSummary {
                sample: id,
                final_max,
                increased_late: final_max > before,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_max_is_monotone_and_depth_stable() {
        for (i, th) in crate::sampling::theta_samples(3, 4, 163).iter().enumerate() {
            let a = limsup_records(th, 40, i).unwrap();
            let b = limsup_records(th, 80, i).unwrap();
            assert!(b.windows(2).all(|w| w[0].running_max <= w[1].running_max));
            assert_eq!(a[..], b[..a.len()]);
            assert!(b.last().unwrap().running_max >= a.last().unwrap().running_max);
        }
    }

    #[test]
    fn silver_ratio_decays() {
        let th = CFExpansion::periodic(&[], &[2]).unwrap();
        let r = limsup_records(&th, 200, 0).unwrap();
        assert!(r.last().unwrap().ratio < r[10].ratio);
        assert!(!summarize_limsup(&r)[0].increased_late);
    }
}
