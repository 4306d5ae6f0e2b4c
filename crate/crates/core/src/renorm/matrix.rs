//! Return-time matrices `M(θ)`. Products `M⁽ⁿ⁾ = M_{n−1}⋯M₀` applied to
//! `[1, 1]ᵗ` give `[|σ⁽ⁿ⁾(A)|, |σ⁽ⁿ⁾(C)|]ᵗ`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rule::{rule_case, RuleCase};
use crate::cf::CFExpansion;
use crate::error::Result;
use crate::exact::ln_abs_int;
use crate::trajectory::{leading_quotients, LeadingQuotients};

/// A 2×2 nonnegative integer matrix with `|det| = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReturnMatrix(pub [[BigInt; 2]; 2]);

impl ReturnMatrix {
    pub fn identity() -> Self {
        Self::from_u64([[1, 0], [0, 1]])
    }

    pub fn from_u64(m: [[u64; 2]; 2]) -> Self {
        ReturnMatrix(m.map(|row| row.map(BigInt::from)))
    }

    /// The matrix for a number with these leading quotients.
    pub fn from_quotients(q: &LeadingQuotients) -> Result<Self> {
        Ok(Self::for_case(rule_case(q)?, q.a1))
    }

    pub fn for_expansion(cf: &CFExpansion) -> Result<Self> {
        Self::from_quotients(&LeadingQuotients {
            a1: cf.a1(),
            a2: cf.quotient(1),
            a3: cf.quotient(2),
        })
    }

    fn for_case(case: RuleCase, a1: u64) -> Self {
        let a1b = BigInt::from(a1);
        match case {
            RuleCase::EvenA3Ne1 { a2, .. } => {
                let a2 = BigInt::from(a2);
                let base = (&a1b - 1) * &a2;
                ReturnMatrix([[&base + 1, a2.clone()], [&base + &a1b, a2 + 1]])
            }
            RuleCase::EvenA3Eq1 { a2, .. } => {
                let a2 = BigInt::from(a2);
                let base = (&a1b - 1) * &a2;
                ReturnMatrix([[&base + &a1b, &a2 + 1], [&base + 1, a2]])
            }
            RuleCase::Odd { .. } => ReturnMatrix([[a1b - 1, BigInt::one()], [BigInt::one(), BigInt::zero()]]),
            RuleCase::One => Self::identity(),
        }
    }

    pub fn det(&self) -> BigInt {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> BigInt {
        &self.0[0][0] + &self.0[1][1]
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &ReturnMatrix) -> ReturnMatrix {
        let (a, b) = (&self.0, &rhs.0);
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        ReturnMatrix([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// `self · [1, 1]ᵗ`.
    pub fn apply_ones(&self) -> [BigInt; 2] {
        let m = &self.0;
        [&m[0][0] + &m[0][1], &m[1][0] + &m[1][1]]
    }

    /// Spectral radius from the characteristic polynomial,
    /// `(tr + √(tr² − 4·det)) / 2`.
    pub fn spectral_radius(&self) -> f64 {
        let tr = self.trace();
        let det = self.det();
        let disc = &tr * &tr - BigInt::from(4) * &det;
        let trf = bigf(&tr);
        if disc.is_negative() {
            return (trf * trf / 4.0 - bigf(&disc) / 4.0).sqrt();
        }
        (trf + bigf(&disc).sqrt()) / 2.0
    }
}

impl Serialize for ReturnMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = self.0.clone().map(|r| r.map(|x| x.to_string()));
        rows.serialize(s)
    }
}

fn bigf(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}

impl fmt::Display for ReturnMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// Closed-form top eigenvalue of `M(θ)`: `ka₂ + 1 + √(ka₂(ka₂ + 2))` in the
/// even cases, `k + √(k² + 1)` in the odd case, 1 for `a₁ = 1`.
pub fn top_eigenvalue(q: &LeadingQuotients) -> Result<f64> {
    Ok(match rule_case(q)? {
        RuleCase::EvenA3Ne1 { k, a2 } | RuleCase::EvenA3Eq1 { k, a2 } => {
            let x = k as f64 * a2 as f64;
            x + 1.0 + (x * (x + 2.0)).sqrt()
        }
        RuleCase::Odd { k } => {
            let k = k as f64;
            k + (k * k + 1.0).sqrt()
        }
        RuleCase::One => 1.0,
    })
}

/// Spectral radius of `M(θ)` itself. Agrees with [`top_eigenvalue`] except
/// when `a₁` is even and `a₃ = 1`, where the matrix has `det = −1` and top
/// eigenvalue `k(a₂ + 1) + √(k²(a₂ + 1)² + 1)`.
pub fn spectral_radius_for(q: &LeadingQuotients) -> Result<f64> {
    Ok(match rule_case(q)? {
        RuleCase::EvenA3Eq1 { k, a2 } => {
            let t = k as f64 * (a2 as f64 + 1.0);
            t + (t * t + 1.0).sqrt()
        }
        _ => top_eigenvalue(q)?,
    })
}

/// Return matrices `M₀, …, M_{n−1}` along the gap orbit of `θ`.
pub fn orbit_matrices(theta: &CFExpansion, n: usize) -> Result<Vec<ReturnMatrix>> {
    leading_quotients(theta, n)?
        .iter()
        .map(ReturnMatrix::from_quotients)
        .collect()
}

/// `M⁽ⁿ⁾ = M_{n−1}⋯M₀`.
pub fn matrix_product(matrices: &[ReturnMatrix]) -> ReturnMatrix {
    matrices.iter().fold(ReturnMatrix::identity(), |acc, m| m.mul(&acc))
}

/// `(|σ⁽ⁿ⁾(A)|, |σ⁽ⁿ⁾(C)|)` for every level `0..=matrices.len()`.
pub fn level_lengths(matrices: &[ReturnMatrix]) -> Vec<[BigInt; 2]> {
    let mut out = Vec::with_capacity(matrices.len() + 1);
    let mut v = [BigInt::one(), BigInt::one()];
    out.push(v.clone());
    for m in matrices {
        let a = &m.0;
        v = [&a[0][0] * &v[0] + &a[0][1] * &v[1], &a[1][0] * &v[0] + &a[1][1] * &v[1]];
        out.push(v.clone());
    }
    out
}

/// `(|σ⁽ⁿ⁾(A)|, |σ⁽ⁿ⁾(C)|) = M⁽ⁿ⁾ [1, 1]ᵗ`.
pub fn matrix_product_lengths(theta: &CFExpansion, n: usize) -> Result<(BigInt, BigInt)> {
    let [a, c] = matrix_product(&orbit_matrices(theta, n)?).apply_ones();
    Ok((a, c))
}

/// `(1/n)·log ‖M⁽ⁿ⁾[1, 1]ᵗ‖` with the max-entry norm.
pub fn lyapunov_estimate(theta: &CFExpansion, n: usize) -> Result<f64> {
    let lens = level_lengths(&orbit_matrices(theta, n)?);
    Ok(lyapunov_from_lengths(&lens[n], n))
}

pub(crate) fn lyapunov_from_lengths(lens: &[BigInt; 2], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let top = lens[0].clone().max(lens[1].clone());
    ln_abs_int(&top) / n as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub min_len: String,
    pub max_len_lag3: String,
    /// `min(|σ⁽ⁿ⁾(A)|, |σ⁽ⁿ⁾(C)|) ≥ max(|σ⁽ⁿ⁻³⁾(A)|, |σ⁽ⁿ⁻³⁾(C)|)`.
    pub lag_inequality: bool,
    pub log_len_per_level: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub theta: String,
    pub lyapunov: f64,
    pub epsilon: f64,
    pub rows: Vec<GrowthRow>,
    /// `log|Ωₙ|/n ∈ [λ̂ − ε, λ̂ + ε]` at the final level (logs of λ̂).
    pub band_ok: bool,
}

impl GrowthReport {
    pub fn all_lag_inequalities_hold(&self) -> bool {
        self.rows.iter().all(|r| r.lag_inequality)
    }
}

/// Checks the lagged length inequality for `3 ≤ n ≤ n_max` and whether the
/// level-`n_max` growth rate sits within `epsilon` of the Lyapunov estimate.
pub fn check_prop_growth(theta: &CFExpansion, n_max: usize, epsilon: f64) -> Result<GrowthReport> {
    let lens = level_lengths(&orbit_matrices(theta, n_max)?);
    let rows = (3..=n_max)
        .map(|n| {
            let min_now = lens[n][0].clone().min(lens[n][1].clone());
            let max_then = lens[n - 3][0].clone().max(lens[n - 3][1].clone());
            GrowthRow {
                n,
                lag_inequality: min_now >= max_then,
                min_len: min_now.to_string(),
                max_len_lag3: max_then.to_string(),
                log_len_per_level: ln_abs_int(&lens[n][0]) / n as f64,
            }
        })
        .collect::<Vec<_>>();
    let lyapunov = lyapunov_from_lengths(&lens[n_max], n_max);
    let band_ok = n_max == 0 || {
        let rate = ln_abs_int(&lens[n_max][0]) / n_max as f64;
        (rate - lyapunov).abs() <= epsilon
    };
    Ok(GrowthReport {
        theta: theta.spec(),
        lyapunov,
        epsilon,
        rows,
        band_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lq(a1: u64, a2: u64, a3: u64) -> LeadingQuotients {
        LeadingQuotients {
            a1,
            a2: Some(a2),
            a3: Some(a3),
        }
    }

    #[test]
    fn table_rows() {
        assert_eq!(
            ReturnMatrix::from_quotients(&lq(2, 2, 2)).unwrap(),
            ReturnMatrix::from_u64([[3, 2], [4, 3]])
        );
        assert_eq!(
            ReturnMatrix::from_quotients(&lq(2, 2, 1)).unwrap(),
            ReturnMatrix::from_u64([[4, 3], [3, 2]])
        );
        assert_eq!(
            ReturnMatrix::from_quotients(&lq(3, 9, 9)).unwrap(),
            ReturnMatrix::from_u64([[2, 1], [1, 0]])
        );
        assert_eq!(
            ReturnMatrix::from_quotients(&lq(1, 9, 9)).unwrap(),
            ReturnMatrix::identity()
        );
    }

    #[test]
    fn unimodular() {
        for a1 in 1..12 {
            for a2 in 1..6 {
                for a3 in 1..3 {
                    let m = ReturnMatrix::from_quotients(&lq(a1, a2, a3)).unwrap();
                    assert_eq!(m.det().abs(), BigInt::one(), "{a1} {a2} {a3}");
                }
            }
        }
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial() {
        for (a1, a2, a3) in [(2, 2, 2), (3, 1, 1), (1, 3, 3), (6, 5, 3), (9, 2, 2), (4, 7, 3)] {
            let q = lq(a1, a2, a3);
            let closed = top_eigenvalue(&q).unwrap();
            let direct = ReturnMatrix::from_quotients(&q).unwrap().spectral_radius();
            assert!((closed - direct).abs() < 1e-9 * closed, "{q:?}");
        }
        assert!((top_eigenvalue(&lq(2, 2, 2)).unwrap() - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((top_eigenvalue(&lq(3, 2, 2)).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(top_eigenvalue(&lq(1, 2, 2)).unwrap(), 1.0);
    }

    #[test]
    fn swapped_rows_have_a_different_spectrum() {
        // a₃ = 1 swaps the rows: det −1, trace 2k(a₂ + 1)
        let q = lq(6, 5, 1);
        let m = ReturnMatrix::from_quotients(&q).unwrap();
        assert_eq!(m.det(), BigInt::from(-1));
        let expect = 18.0 + (18.0f64 * 18.0 + 1.0).sqrt();
        assert!((m.spectral_radius() - expect).abs() < 1e-9);
        assert!((top_eigenvalue(&q).unwrap() - (16.0 + 255f64.sqrt())).abs() < 1e-9);
        assert!((spectral_radius_for(&q).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn product_lengths() {
        let silver = CFExpansion::periodic(&[], &[2]).unwrap();
        assert_eq!(matrix_product_lengths(&silver, 1).unwrap(), (5.into(), 7.into()));
        assert_eq!(matrix_product_lengths(&silver, 0).unwrap(), (1.into(), 1.into()));
        let odd = CFExpansion::periodic(&[3], &[5]).unwrap();
        assert_eq!(matrix_product_lengths(&odd, 1).unwrap(), (3.into(), 1.into()));
    }

    #[test]
    fn silver_lyapunov_converges() {
        let silver = CFExpansion::periodic(&[], &[2]).unwrap();
        let limit = (3.0 + 2.0 * 2f64.sqrt()).ln();
        assert!((lyapunov_estimate(&silver, 20).unwrap() - limit).abs() < 0.05);
    }

    #[test]
    fn silver_growth_inequality() {
        let silver = CFExpansion::periodic(&[], &[2]).unwrap();
        let r = check_prop_growth(&silver, 4, 0.2).unwrap();
        assert!(r.all_lag_inequalities_hold());
        assert!(r.band_ok);
    }
}
