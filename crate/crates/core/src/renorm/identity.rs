//! `ρ(Ωₙ) = ½ Σ E(a₁(θᵢ)) + ξ` and the monotonicity relations between
//! levels.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use super::matrix::{level_lengths, lyapunov_from_lengths, orbit_matrices};
use super::rule::{level_stats, RuleCase, SubstitutionRule};
use super::stats::{Letter, WordStats};
use crate::cf::{parity_floor, CFExpansion};
use crate::error::Result;
use crate::trajectory::{leading_quotients, LeadingQuotients};

/// Which `θᵢ` enter the half-sum at level `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum HalfsumRange {
    /// `i = 0, …, n − 1`: one term per substitution in `σ⁽ⁿ⁾`.
    #[default]
    Levels,
    /// `i = 0, …, n`.
    Inclusive,
}

impl HalfsumRange {
    fn terms(self, n: usize) -> usize {
        match self {
            HalfsumRange::Levels => n,
            HalfsumRange::Inclusive => n + 1,
        }
    }
}

/// The range shipped by [`renorm_identity`]. With `Levels`, `|ξ| ≤ 5` holds on
/// every sample tried; `Inclusive` breaks it whenever `a₁(θₙ)` is large.
pub const CALIBRATED_RANGE: HalfsumRange = HalfsumRange::Levels;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RenormIdentity {
    #[serde(with = "crate::serde_big")]
    pub rho: BigInt,
    #[serde(with = "crate::serde_big")]
    pub halfsum: BigInt,
    #[serde(with = "crate::serde_big")]
    pub xi: BigInt,
}

fn halfsum(quotients: &[LeadingQuotients]) -> BigInt {
    let total: BigInt = quotients.iter().map(|q| BigInt::from(parity_floor(q.a1))).sum();
    let (half, rem) = total.div_rem(&BigInt::from(2));
    assert!(rem == BigInt::from(0), "E(·) is always even");
    half
}

/// `(ρ(Ωₙ), ½ Σ E(a₁(θᵢ)), ξ)` with the calibrated index range.
pub fn renorm_identity(theta: &CFExpansion, n: usize) -> Result<RenormIdentity> {
    renorm_identity_with(theta, n, CALIBRATED_RANGE)
}

pub fn renorm_identity_with(theta: &CFExpansion, n: usize, range: HalfsumRange) -> Result<RenormIdentity> {
    let q = leading_quotients(theta, range.terms(n).max(n))?;
    let rules = q[..n]
        .iter()
        .map(SubstitutionRule::from_quotients)
        .collect::<Result<Vec<_>>>()?;
    let rho = level_stats(&rules)[n][Letter::A.index()].rho();
    let halfsum = halfsum(&q[..range.terms(n)]);
    Ok(RenormIdentity {
        xi: &rho - &halfsum,
        rho,
        halfsum,
    })
}

/// `ξ` at every level `0..=n` from one pass over the orbit.
pub fn xi_profile(theta: &CFExpansion, n: usize, range: HalfsumRange) -> Result<Vec<RenormIdentity>> {
    let q = leading_quotients(theta, range.terms(n))?;
    let rules = q[..n]
        .iter()
        .map(SubstitutionRule::from_quotients)
        .collect::<Result<Vec<_>>>()?;
    let levels = level_stats(&rules);
    Ok((0..=n)
        .map(|i| {
            let rho = levels[i][Letter::A.index()].rho();
            let halfsum = halfsum(&q[..range.terms(i)]);
            RenormIdentity {
                xi: &rho - &halfsum,
                rho,
                halfsum,
            }
        })
        .collect())
}

/// One row of the renormalization report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenormRecord {
    pub theta_spec: String,
    pub n: usize,
    #[serde(rename = "lenA")]
    pub len_a: String,
    #[serde(rename = "lenC")]
    pub len_c: String,
    pub rho: String,
    pub halfsum: String,
    pub xi: String,
    pub lyap_estimate: f64,
}

/// Records for levels `0..=n`.
pub fn renorm_report(theta: &CFExpansion, n: usize) -> Result<Vec<RenormRecord>> {
    let xi = xi_profile(theta, n, CALIBRATED_RANGE)?;
    let lens = level_lengths(&orbit_matrices(theta, n)?);
    Ok(xi
        .into_iter()
        .zip(&lens)
        .enumerate()
        .map(|(i, (id, l))| RenormRecord {
            theta_spec: theta.spec(),
            n: i,
            len_a: l[0].to_string(),
            len_c: l[1].to_string(),
            rho: id.rho.to_string(),
            halfsum: id.halfsum.to_string(),
            xi: id.xi.to_string(),
            lyap_estimate: lyapunov_from_lengths(l, i),
        })
        .collect())
}

/// The level relations `ρ(σ⁽ⁿ⁻¹⁾(A)) ≤ ρ(σ⁽ⁿ⁾(*))` and `ρ(σ⁽ⁿ⁾(*)) ≤ ρ(σ⁽ⁿ⁾(A))`
/// for each `* ∈ {A, B, C}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneRow {
    pub n: usize,
    /// `σ_{n−1}` is the identity, so level `n` repeats level `n − 1`.
    pub after_identity: bool,
    pub rho_prev_a: String,
    pub rho: [String; 3],
    pub lower: [bool; 3],
    pub upper: [bool; 3],
    /// The weaker `ρ(σ⁽ⁿ⁾(*)) ≤ 2ρ(σ⁽ⁿ⁾(A))`.
    pub upper_doubled: [bool; 3],
}

/// Rows for `1 ≤ n ≤ n_max`.
///
/// The lower relation holds except right after an identity step, where
/// level `n` repeats level `n − 1` and `σ⁽ⁿ⁾(C)` can be much shorter than
/// `σ⁽ⁿ⁾(A)`. The exact upper relation fails outright: for
/// `θ = [2, 2, …]`, `σ₀(C) = ABCACAC` has `ρ = 3` while `σ₀(A) = A²CAC` has
/// `ρ = 2`. The doubled form is what the orbit sandwich actually uses.
pub fn monotone_levels(theta: &CFExpansion, n_max: usize) -> Result<Vec<MonotoneRow>> {
    let rules = leading_quotients(theta, n_max)?
        .iter()
        .map(SubstitutionRule::from_quotients)
        .collect::<Result<Vec<_>>>()?;
    let levels = level_stats(&rules);
    Ok((1..=n_max)
        .map(|n| {
            let prev = levels[n - 1][0].rho();
            let top = levels[n][0].rho();
            let rho = levels[n].clone().map(|s: WordStats| s.rho());
            MonotoneRow {
                n,
                after_identity: rules[n - 1].case() == RuleCase::One,
                lower: rho.clone().map(|r| prev <= r),
                upper: rho.clone().map(|r| r <= top),
                upper_doubled: rho.clone().map(|r| r <= &top * 2),
                rho_prev_a: prev.to_string(),
                rho: rho.map(|r| r.to_string()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn silver() -> CFExpansion {
        CFExpansion::periodic(&[], &[2]).unwrap()
    }

    #[test]
    fn silver_level_one() {
        let id = renorm_identity(&silver(), 1).unwrap();
        assert_eq!(id.rho, 2.into());
        assert_eq!(id.halfsum, 1.into());
        assert_eq!(id.xi, 1.into());
    }

    #[test]
    fn ones_contribute_nothing() {
        let th = CFExpansion::periodic(&[1, 3], &[4]).unwrap();
        let p = xi_profile(&th, 1, HalfsumRange::Levels).unwrap();
        assert_eq!(p[1].halfsum, 0.into());
        assert_eq!(p[1].rho, 1.into());
    }

    #[test]
    fn profile_matches_pointwise() {
        let th = CFExpansion::finite(&[4, 1, 6, 3, 2, 8, 5, 3, 7, 2, 9, 4, 4, 1, 3, 6, 2, 2, 5, 7, 3, 3]).unwrap();
        let p = xi_profile(&th, 5, CALIBRATED_RANGE).unwrap();
        for (n, row) in p.iter().enumerate() {
            assert_eq!(row, &renorm_identity(&th, n).unwrap());
        }
    }

    #[test]
    fn exact_upper_relation_fails_on_silver() {
        let rows = monotone_levels(&silver(), 1).unwrap();
        assert_eq!(rows[0].rho, ["2".to_string(), "3".into(), "3".into()]);
        assert_eq!(rows[0].upper, [true, false, false]);
        assert!(rows[0].upper_doubled.iter().all(|&b| b));
        assert!(rows[0].lower.iter().all(|&b| b));
    }

    #[test]
    fn report_has_a_row_per_level() {
        let r = renorm_report(&silver(), 3).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r[1].len_a, "5");
        assert_eq!(r[1].len_c, "7");
    }
}
