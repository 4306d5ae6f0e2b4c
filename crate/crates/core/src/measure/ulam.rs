//! Ulam discretization of the transfer operator of `g` on uniform bins.
//!
//! Columns are assembled from exact inverse branches: for a target bin
//! `[y₁, y₂)` every branch preimage is an interval with rational endpoints,
//! split across source bins exactly. Cells accumulating at `0` and at each
//! `1/(2n)` are infinitely many, so their contributions are summed in closed
//! form. Along `Odd(k)`, `k ≥ K`,
//!
//! `Σ Leb(g⁻¹[y₁, y₂)) = ½[ψ(K + 1/(2y₁)) − ψ(K + 1/(2y₂))]`,
//!
//! and along `Even(n, m)`, `m ≥ M`,
//!
//! `Σ Leb(g⁻¹[y₁, y₂)) = (1/4n²)[ψ(M + y₂ + 1/2n) − ψ(M + y₁ + 1/2n)]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::cell::PartitionCell;
use crate::error::{Error, Result};

/// Smallest raw row mass accepted before renormalization.
pub const MIN_ROW_MASS: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TailMode {
    /// Infinite families summed in closed form.
    Analytic,
    /// Only `Odd(k)` with `2k + 1 ≤ k_max` and `Even(n, m)` with `2nm ≤ k_max`.
    Truncated { k_max: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UlamOperator {
    pub bins: usize,
    /// Row-major `P[i][j]`.
    pub p: Vec<f64>,
    /// Largest `|1 − row sum|` before renormalization.
    pub renormalization: f64,
}

impl UlamOperator {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.bins + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.p[i * self.bins..(i + 1) * self.bins]
    }

    /// `v ↦ vP`.
    pub fn push_forward(&self, v: &[f64]) -> Vec<f64> {
        let n = self.bins;
        let mut out = vec![0.0; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &pij) in out.iter_mut().zip(self.row(i)) {
                *o += vi * pij;
            }
        }
        out
    }

    /// `w ↦ Pw`.
    pub fn pull_back(&self, w: &[f64]) -> Vec<f64> {
        (0..self.bins)
            .map(|i| self.row(i).iter().zip(w).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// An exact point `num/den` of `[0, 1]`.
#[derive(Clone, Copy, Debug)]
struct Pt {
    num: i128,
    den: i128,
}

impl Pt {
    fn new(num: i128, den: i128) -> Self {
        Pt { num, den }
    }

    /// `self − other` in floating point, computed from the exact difference.
    fn minus(self, other: Pt) -> f64 {
        let n = self.num * other.den - other.num * self.den;
        n as f64 / (self.den as f64 * other.den as f64)
    }

    fn lt(self, other: Pt) -> bool {
        self.num * other.den < other.num * self.den
    }

    /// Index of the bin `[i/N, (i+1)/N)` holding the point.
    fn bin(self, n: i128) -> i128 {
        (self.num * n).div_euclid(self.den)
    }

    /// Index of the bin `(i/N, (i+1)/N]` holding the point.
    fn bin_left(self, n: i128) -> i128 {
        (self.num * n - 1).div_euclid(self.den)
    }
}

/// Adds `N·Leb([a, b) ∩ Iᵢ)` to each source bin `i`.
fn spread(a: Pt, b: Pt, n: usize, out: &mut Vec<(usize, f64)>) {
    let nn = n as i128;
    let first = a.bin(nn);
    let last = b.bin_left(nn).min(nn - 1);
    for i in first..=last {
        let lo = Pt::new(i, nn);
        let hi = Pt::new(i + 1, nn);
        let left = if a.lt(lo) { lo } else { a };
        let right = if hi.lt(b) { hi } else { b };
        let len = right.minus(left);
        if len > 0.0 {
            out.push((i as usize, len * n as f64));
        }
    }
}

/// The bin whose closure holds the accumulation point `1/(2n)` from the left.
fn accumulation_bin(n: u64, bins: u64) -> u64 {
    bins.div_ceil(2 * n) - 1
}

/// First `m` such that `Even(n, m')` lies inside the accumulation bin for
/// every `m' ≥ m`.
fn tail_start(n: u64, bins: u64) -> u64 {
    let b = accumulation_bin(n, bins);
    let room = bins - 2 * n * b;
    b.div_ceil(room).max(1)
}

fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    acc + r + r2 / 2.0 + r * r2 * (1.0 / 6.0 - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 / 30.0)))
}

/// `Σ_{n ≥ start} n^{−s}` for `s ∈ {2, 3}` by Euler–Maclaurin.
fn zeta_tail(s: i32, start: f64) -> f64 {
    let a = start;
    let f = a.powi(-s);
    let sf = s as f64;
    let int = a.powi(1 - s) / (sf - 1.0);
    let d1 = -sf * a.powi(-s - 1);
    let d3 = -sf * (sf + 1.0) * (sf + 2.0) * a.powi(-s - 3);
    int + f / 2.0 - d1 / 12.0 + d3 / 720.0
}

/// `F(y) = Σ_{n ≥ n0} ψ(1 + y + 1/2n)/(4n²)`, explicit below `n1`.
fn even_band_potential(y: f64, n0: u64, n1: u64) -> f64 {
    let explicit: f64 = (n0..n1)
        .map(|n| {
            let nf = n as f64;
            digamma(1.0 + y + 0.5 / nf) / (4.0 * nf * nf)
        })
        .sum();
    // ψ(1 + y + c) ≈ ψ(1 + y) + c·ψ′(1 + y)
    let t = n1 as f64;
    explicit + digamma(1.0 + y) * zeta_tail(2, t) / 4.0 + trigamma(1.0 + y) * zeta_tail(3, t) / 8.0
}

/// How many `n` past the accumulation range are summed term by term.
fn explicit_span(cutoff: f64) -> u64 {
    ((1.0 / cutoff.max(1e-16)).sqrt().ceil() as u64).clamp(64, 1_000_000)
}

struct Plan {
    bins: u64,
    /// Odd cells `k < odd_tail` are explicit.
    odd_tail: u64,
    /// Even bands `n < even_tail` have explicit heads.
    even_tail: u64,
    /// Per band `n`: explicit `m < tail_m[n]`.
    tail_m: Vec<u64>,
    analytic: bool,
    /// Precomputed `F` at every bin edge.
    potential: Vec<f64>,
}

impl Plan {
    fn new(bins: usize, mode: TailMode, cutoff: f64) -> Self {
        let nb = bins as u64;
        match mode {
            TailMode::Analytic => {
                let odd_tail = (nb - 1).div_ceil(2).max(1);
                let even_tail = nb / 2;
                let tail_m = (0..even_tail)
                    .map(|n| if n == 0 { 0 } else { tail_start(n, nb) })
                    .collect();
                let n1 = even_tail.max(1) + explicit_span(cutoff);
                let potential = (0..=bins)
                    .into_par_iter()
                    .map(|j| even_band_potential(j as f64 / bins as f64, even_tail.max(1), n1))
                    .collect();
                Plan {
                    bins: nb,
                    odd_tail,
                    even_tail,
                    tail_m,
                    analytic: true,
                    potential,
                }
            }
            TailMode::Truncated { k_max } => {
                let odd_tail = k_max.saturating_sub(1) / 2 + 1;
                let even_tail = k_max / 2 + 1;
                let tail_m = (0..even_tail)
                    .map(|n| if n == 0 { 0 } else { k_max / (2 * n) + 1 })
                    .collect();
                Plan {
                    bins: nb,
                    odd_tail,
                    even_tail,
                    tail_m,
                    analytic: false,
                    potential: Vec::new(),
                }
            }
        }
    }

    fn column(&self, j: u64) -> Vec<(usize, f64)> {
        let n = self.bins;
        let nf = n as f64;
        let (y1, y2) = (j as f64 / nf, (j + 1) as f64 / nf);
        let (j, ni) = (j as i128, n as i128);
        let mut out = Vec::new();
        if 2 * j < ni {
            // Half: θ = 1 − y
            spread(Pt::new(ni - j - 1, ni), Pt::new(ni - j, ni), n as usize, &mut out);
        } else {
            // Odd(k): θ = y/(1 + 2ky)
            for k in 1..self.odd_tail {
                let k = k as i128;
                let a = Pt::new(j, ni + 2 * k * j);
                let b = Pt::new(j + 1, ni + 2 * k * (j + 1));
                spread(a, b, n as usize, &mut out);
            }
            if self.analytic {
                let kt = self.odd_tail as f64;
                let mass = 0.5 * (digamma(kt + 0.5 / y1) - digamma(kt + 0.5 / y2));
                out.push((0, mass * nf));
            }
        }
        // Even(n, m): θ = (m + y)/(2n(m + y) + 1)
        for band in 1..self.even_tail {
            let b2 = 2 * band as i128;
            let m_end = self.tail_m[band as usize];
            for m in 1..m_end {
                let u1 = m as i128 * ni + j;
                let u2 = u1 + 1;
                spread(
                    Pt::new(u1, b2 * u1 + ni),
                    Pt::new(u2, b2 * u2 + ni),
                    n as usize,
                    &mut out,
                );
            }
            if self.analytic {
                let c = 0.5 / band as f64;
                let mf = m_end as f64;
                let mass = (digamma(mf + y2 + c) - digamma(mf + y1 + c)) / (4.0 * (band * band) as f64);
                out.push((accumulation_bin(band, n) as usize, mass * nf));
            }
        }
        if self.analytic {
            let mass = self.potential[j as usize + 1] - self.potential[j as usize];
            out.push((0, mass * nf));
        }
        out
    }
}

/// Ulam matrix on `bins` uniform bins.
pub fn build_ulam(bins: usize, mode: TailMode, branch_cutoff_mass: f64) -> Result<UlamOperator> {
    if bins < 2 || bins % 2 == 1 {
        return Err(Error::InvalidArgument(format!("bins must be even and ≥ 2, got {bins}")));
    }
    let plan = Plan::new(bins, mode, branch_cutoff_mass);
    let columns: Vec<Vec<(usize, f64)>> = (0..bins as u64).into_par_iter().map(|j| plan.column(j)).collect();
    let mut p = vec![0.0; bins * bins];
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col {
            p[i * bins + j] += v;
        }
    }
    let mut worst = 0.0f64;
    for i in 0..bins {
        let row = &mut p[i * bins..(i + 1) * bins];
        let mass: f64 = row.iter().sum();
        if mass < MIN_ROW_MASS {
            return Err(Error::CutoffTooAggressive { row: i, mass });
        }
        worst = worst.max((1.0 - mass).abs());
        row.iter_mut().for_each(|x| *x /= mass);
    }
    Ok(UlamOperator {
        bins,
        p,
        renormalization: worst,
    })
}

/// Every solution of `g(θ) = y` with its cell, exactly. Branches are listed
/// while their cells are at least `min_length` long; pass `0.0` for the
/// `Odd` and `Even` families up to `limit` each.
pub fn inverse_branches(
    y: &crate::ExactReal,
    min_length: f64,
    limit: u64,
) -> Result<Vec<(crate::ExactReal, PartitionCell)>> {
    use std::cmp::Ordering;
    let half = crate::ExactReal::ratio(1, 2);
    if y.signum() != Ordering::Greater || y.try_cmp(&crate::ExactReal::one()) != Some(Ordering::Less) {
        return Err(Error::OutOfUnitInterval(y.to_string()));
    }
    let side = y.try_cmp(&half);
    if side == Some(Ordering::Equal) {
        return Err(Error::CellEndpoint {
            value: y.to_string(),
            cell: "image boundary 1/2".into(),
        });
    }
    let keep = |c: &PartitionCell| c.length() >= min_length;
    let mut out = Vec::new();
    let mut push = |c: PartitionCell| out.push((c.inverse_unchecked(y), c));
    if side == Some(Ordering::Less) {
        push(PartitionCell::Half);
    } else {
        for k in 1..=limit {
            let c = PartitionCell::Odd { k };
            if !keep(&c) {
                break;
            }
            push(c);
        }
    }
    for n in 1..=limit {
        if !keep(&PartitionCell::Even { n, m: 1 }) {
            break;
        }
        for m in 1..=limit {
            let c = PartitionCell::Even { n, m };
            if !keep(&c) {
                break;
            }
            push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ExactReal;

    #[test]
    fn two_bins() {
        let op = build_ulam(2, TailMode::Analytic, 1e-8).unwrap();
        assert!((op.entry(1, 0) - 1.0).abs() < 1e-12);
        assert!(op.entry(1, 1).abs() < 1e-12);
    }

    #[test]
    fn rows_sum_to_one_before_renormalization() {
        let op = build_ulam(64, TailMode::Analytic, 1e-8).unwrap();
        assert!(op.renormalization < 1e-9, "{}", op.renormalization);
        for i in 0..64 {
            let s: f64 = op.row(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(op.row(i).iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn truncation_starves_the_first_row() {
        match build_ulam(64, TailMode::Truncated { k_max: 4096 }, 1e-8) {
            Err(Error::CutoffTooAggressive { row, .. }) => assert_eq!(row, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn closed_form_tails_match_direct_sums() {
        let (y1, y2) = (0.6f64, 0.65f64);
        let (k0, terms) = (7u64, 2_000_000u64);
        let direct: f64 = (k0..k0 + terms)
            .map(|k| {
                let k = k as f64;
                (y2 - y1) / ((1.0 + 2.0 * k * y1) * (1.0 + 2.0 * k * y2))
            })
            .sum();
        let rest = 0.25 * (1.0 / y1 - 1.0 / y2) / (k0 + terms) as f64;
        let closed = 0.5 * (digamma(k0 as f64 + 0.5 / y1) - digamma(k0 as f64 + 0.5 / y2));
        assert!(
            (direct + rest - closed).abs() < 1e-12 * closed.abs().max(1e-3) + 1e-13,
            "{direct} {closed}"
        );

        let (n, m0) = (3u64, 5u64);
        let c = 0.5 / n as f64;
        let nf = n as f64;
        let direct: f64 = (m0..m0 + terms)
            .map(|m| {
                let (u1, u2) = (m as f64 + y1, m as f64 + y2);
                (y2 - y1) / ((2.0 * nf * u1 + 1.0) * (2.0 * nf * u2 + 1.0))
            })
            .sum();
        let rest = (y2 - y1) / (4.0 * (n * n) as f64 * (m0 + terms) as f64);
        let closed = (digamma(m0 as f64 + y2 + c) - digamma(m0 as f64 + y1 + c)) / (4.0 * (n * n) as f64);
        assert!((direct + rest - closed).abs() < 1e-10 * closed, "{direct} {closed}");
    }

    #[test]
    fn explicit_rows_match_truncated_enumeration() {
        // rows 18, 25, 28 of 64 hold only finitely many cells
        let a = build_ulam(64, TailMode::Analytic, 1e-8).unwrap();
        let plan = Plan::new(64, TailMode::Truncated { k_max: 64 }, 1e-8);
        let mut raw = vec![0.0; 64 * 64];
        for j in 0..64u64 {
            for (i, v) in plan.column(j) {
                raw[i * 64 + j as usize] += v;
            }
        }
        for i in [18usize, 25, 28] {
            let mass: f64 = raw[i * 64..(i + 1) * 64].iter().sum();
            assert!((mass - 1.0).abs() < 1e-12, "row {i} mass {mass}");
            for j in 0..64 {
                assert!((a.entry(i, j) - raw[i * 64 + j]).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn tail_start_is_inside_the_bin() {
        for bins in [64u64, 100, 512] {
            for n in 1..bins / 2 {
                let b = accumulation_bin(n, bins);
                let m = tail_start(n, bins);
                // m/(2nm + 1) ≥ b/N and 1/(2n) ≤ (b + 1)/N
                assert!(m * bins >= b * (2 * n * m + 1));
                assert!(bins <= 2 * n * (b + 1));
                if m > 1 {
                    assert!((m - 1) * bins < b * (2 * n * (m - 1) + 1));
                }
            }
        }
    }

    #[test]
    fn branch_examples() {
        let br = inverse_branches(&ExactReal::ratio(1, 4), 0.0, 3).unwrap();
        assert_eq!(br[0], (ExactReal::ratio(3, 4), PartitionCell::Half));
        assert!(br.contains(&(ExactReal::ratio(5, 14), PartitionCell::Even { n: 1, m: 1 })));
        let br = inverse_branches(&ExactReal::ratio(3, 4), 0.0, 3).unwrap();
        assert_eq!(br[0], (ExactReal::ratio(3, 10), PartitionCell::Odd { k: 1 }));
        for y in [
            ExactReal::ratio(1, 4),
            ExactReal::ratio(3, 4),
            ExactReal::sqrt_of(2).unwrap() - ExactReal::one(),
        ] {
            for (x, c) in inverse_branches(&y, 1e-4, 1000).unwrap() {
                assert_eq!(c.apply(&x).unwrap(), y);
            }
        }
        assert!(inverse_branches(&ExactReal::ratio(1, 2), 0.0, 3).is_err());
    }

    #[test]
    fn trigamma_values() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((trigamma(1.0) - pi2_6).abs() < 1e-13);
        assert!((trigamma(2.0) - (pi2_6 - 1.0)).abs() < 1e-13);
        assert!((zeta_tail(2, 10.0) - (pi2_6 - (1..10).map(|n| 1.0 / (n * n) as f64).sum::<f64>())).abs() < 1e-8);
    }
}
