//! Integrability of `log‖M(θ)‖`: the Lebesgue series over the partition
//! cells and its `μ_g` counterpart from an estimated density.

use serde::{Deserialize, Serialize};

use super::density::DensityEstimate;

const HEAD: usize = 64;
const QUAD_TOL: f64 = 1e-14;

/// Lebesgue length of `Odd(k)`, the cell `(1/(2k+2), 1/(2k+1))`.
pub fn odd_length(k: f64) -> f64 {
    1.0 / ((2.0 * k + 1.0) * (2.0 * k + 2.0))
}

/// Lebesgue length of `Even(n, m)`.
pub fn even_length(n: f64, m: f64) -> f64 {
    1.0 / ((2.0 * n * m + 1.0) * (2.0 * n * (m + 1.0) + 1.0))
}

/// `Σ_{k ≥ a} f(k)` for a smooth, eventually decreasing `f`: `head` terms
/// explicitly, then Euler–Maclaurin with the integral done by quadrature on
/// `x = N + t/(1 − t)`.
fn sum_from(f: &dyn Fn(f64) -> f64, a: f64, head: usize) -> f64 {
    let explicit: f64 = (0..head).map(|i| f(a + i as f64)).sum();
    let n = a + head as f64;
    let integral = quadrature::integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            f(n + t / s) / (s * s)
        },
        0.0,
        1.0,
        QUAD_TOL,
    )
    .integral;
    let h = 1e-3 * n;
    let df = (f(n + h) - f(n - h)) / (2.0 * h);
    explicit + integral + f(n) / 2.0 - df / 12.0
}

/// The sum at `HEAD` and at `2·HEAD` explicit terms; their gap is the
/// reported error.
fn sum_with_error(f: &dyn Fn(f64) -> f64, a: f64) -> (f64, f64) {
    let coarse = sum_from(f, a, HEAD);
    let fine = sum_from(f, a, 2 * HEAD);
    (fine, (fine - coarse).abs())
}

/// `Σ_{k ≥ k0} w(k)·|Odd(k)|`.
pub fn odd_tail(k0: u64, w: &dyn Fn(f64) -> f64) -> f64 {
    sum_from(&|k| w(k) * odd_length(k), k0 as f64, HEAD)
}

/// `Σ_{m ≥ m0} w(n, m)·|Even(n, m)|` for fixed `n`.
pub fn even_row_tail(n: f64, m0: u64, w: &dyn Fn(f64, f64) -> f64) -> f64 {
    sum_from(&|m| w(n, m) * even_length(n, m), m0 as f64, HEAD)
}

/// `Σ_{n ≥ n0} Σ_{m ≥ 1} w(n, m)·|Even(n, m)|`.
pub fn even_block_tail(n0: u64, w: &dyn Fn(f64, f64) -> f64) -> f64 {
    sum_from(&|n| even_row_tail(n, 1, w), n0 as f64, HEAD)
}

/// Weight of `Odd(k)` in the Lebesgue bound.
pub fn odd_bound_weight(k: f64) -> f64 {
    (2.0 * k + 1.0).ln()
}

/// Weight of `Even(n, m)` in the Lebesgue bound.
pub fn even_bound_weight(n: f64, m: f64) -> f64 {
    (2.0 * n * m + 2.0).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesBound {
    pub odd: f64,
    pub even: f64,
    pub total: f64,
    /// Change in the total when the explicit head is doubled.
    pub error_estimate: f64,
}

impl SeriesBound {
    pub fn relative_error(&self) -> f64 {
        self.error_estimate / self.total
    }
}

/// `Σ log(2k+1)/((2k+1)(2k+2)) + Σ log(2nm+2)/((2nm+1)(2n(m+1)+1))`.
pub fn series_bound() -> SeriesBound {
    let (odd, e1) = sum_with_error(&|k| odd_bound_weight(k) * odd_length(k), 1.0);
    let (even, e2) = sum_with_error(&|n| even_row_tail(n, 1, &even_bound_weight), 1.0);
    SeriesBound {
        odd,
        even,
        total: odd + even,
        error_estimate: e1 + e2,
    }
}

/// `log` of the listed top eigenvalue on `Odd(k)`.
pub fn odd_log_eigen(k: f64) -> f64 {
    (k + (k * k + 1.0).sqrt()).ln()
}

/// `log` of the listed top eigenvalue on `Even(n, m)`.
pub fn even_log_eigen(n: f64, m: f64) -> f64 {
    let x = n * m;
    (x + 1.0 + (x * (x + 2.0)).sqrt()).ln()
}

/// `log` of the true spectral radius on the part of `Even(n, m)` with `a₃ = 1`.
pub fn even_log_radius_a3_one(n: f64, m: f64) -> f64 {
    let t = n * (m + 1.0);
    (t + (t * t + 1.0).sqrt()).ln()
}

/// Lebesgue fraction of `Even(n, m)` where `a₃ = 1`.
pub fn a3_one_fraction(n: f64, m: f64) -> f64 {
    0.5 * (2.0 * n * m + 1.0) / (2.0 * n * m + n + 1.0)
}

fn even_log_radius(n: f64, m: f64) -> f64 {
    let f = a3_one_fraction(n, m);
    (1.0 - f) * even_log_eigen(n, m) + f * even_log_radius_a3_one(n, m)
}

/// `∫ log‖M‖ dμ_g` estimated from a piecewise-constant density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogNormIntegral {
    /// With the listed eigenvalue on every cell.
    pub table: f64,
    /// With the true spectral radius on the `a₃ = 1` subcells.
    pub spectral: f64,
    /// Contribution of `(1/2, 1)`, where `M` is the identity.
    pub half: f64,
    pub odd: f64,
    pub even: f64,
    pub max_density: f64,
}

/// Cells that straddle bin boundaries are weighted by their exact mass under
/// the histogram. Families that pile up inside one bin (odd cells near 0, the
/// row `Even(n, ·)` near `1/(2n)`) are summed as that bin's density times the
/// Lebesgue tail.
pub fn integral_log_norm(density: &DensityEstimate) -> LogNormIntegral {
    let bins = density.bins as u64;
    let f = &density.values;

    let mut odd = 0.0;
    let k_tail = bins.div_ceil(2);
    for k in 1..k_tail {
        let kf = k as f64;
        odd += odd_log_eigen(kf) * density.mass(1.0 / (2.0 * kf + 2.0), 1.0 / (2.0 * kf + 1.0));
    }
    odd += f[0] * odd_tail(k_tail, &odd_log_eigen);

    let mut even = 0.0;
    let mut even_spec = 0.0;
    let n_tail = bins / 2;
    for n in 1..n_tail {
        let nf = n as f64;
        let b = bins.div_ceil(2 * n) - 1;
        let m_tail = b.div_ceil(bins - 2 * n * b).max(1);
        for m in 1..m_tail {
            let mf = m as f64;
            let lo = mf / (2.0 * nf * mf + 1.0);
            let mid = (2.0 * mf + 1.0) / (2.0 * nf * (2.0 * mf + 1.0) + 2.0);
            let hi = (mf + 1.0) / (2.0 * nf * (mf + 1.0) + 1.0);
            let table = even_log_eigen(nf, mf);
            let whole = density.mass(lo, hi);
            even += table * whole;
            let upper = density.mass(mid, hi);
            even_spec += table * (whole - upper) + even_log_radius_a3_one(nf, mf) * upper;
        }
        let fb = f[b as usize];
        even += fb * even_row_tail(nf, m_tail, &even_log_eigen);
        even_spec += fb * even_row_tail(nf, m_tail, &even_log_radius);
    }
    even += f[0] * even_block_tail(n_tail, &even_log_eigen);
    even_spec += f[0] * even_block_tail(n_tail, &even_log_radius);

    LogNormIntegral {
        table: odd + even,
        spectral: odd + even_spec,
        half: 0.0,
        odd,
        even,
        max_density: density.max(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent arbitrary-precision Euler–Maclaurin sums, good to ~1e-9
    const ODD_BOUND: f64 = 0.362_638_298_450_652_4;
    const EVEN_BOUND: f64 = 0.807_999_085_664_667_4;
    const TABLE_LEBESGUE: f64 = 0.333_365_542_719_262_2 + 0.800_926_051_235_065_8;

    #[test]
    fn bound_matches_high_precision_values() {
        let s = series_bound();
        assert!((s.odd - ODD_BOUND).abs() < 1e-10, "{}", s.odd);
        assert!((s.even - EVEN_BOUND).abs() < 5e-9, "{}", s.even);
        assert!(s.relative_error() < 1e-6);
    }

    #[test]
    fn brute_force_partial_sums_approach_from_below() {
        let mut odd = 0.0;
        for k in 1..=200_000u64 {
            let k = k as f64;
            odd += odd_bound_weight(k) * odd_length(k);
        }
        let s = series_bound();
        assert!(odd < s.odd);
        // the missing tail is about log(4·10⁵)/(4·10⁵)
        assert!(s.odd - odd < 4e-5);
        let mut even = 0.0;
        for n in 1..=2000u64 {
            for m in 1..=2000u64 {
                let (n, m) = (n as f64, m as f64);
                even += even_bound_weight(n, m) * even_length(n, m);
            }
        }
        assert!(even < s.even);
        assert!(s.even - even < 2e-2);
    }

    #[test]
    fn cells_tile_the_lower_half() {
        let odd = odd_tail(1, &|_| 1.0);
        let even = even_block_tail(1, &|_, _| 1.0);
        assert!((odd - (2f64.ln() - 0.5)).abs() < 1e-10, "{odd}");
        assert!((odd + even - 0.5).abs() < 1e-8, "{}", odd + even);
    }

    #[test]
    fn uniform_density_recovers_the_lebesgue_series() {
        for bins in [64usize, 256] {
            let d = DensityEstimate {
                bins,
                values: vec![1.0; bins],
                residual: 0.0,
                iterations: 0,
            };
            let i = integral_log_norm(&d);
            assert!((i.table - TABLE_LEBESGUE).abs() < 5e-9, "{bins}: {}", i.table);
            assert!(i.spectral > i.table);
        }
    }

    #[test]
    fn integrands_sit_under_the_bound_weights() {
        for k in 1..200 {
            assert!(odd_log_eigen(k as f64) < odd_bound_weight(k as f64));
        }
        for n in 1..50 {
            for m in 1..50 {
                let (n, m) = (n as f64, m as f64);
                assert!(even_log_eigen(n, m) < even_bound_weight(n, m));
            }
        }
    }

    #[test]
    fn a3_fraction_is_the_subcell_length() {
        for (n, m) in [(1.0, 1.0), (3.0, 7.0), (10.0, 2.0)] {
            let mid = (2.0 * m + 1.0) / (2.0 * n * (2.0 * m + 1.0) + 2.0);
            let hi = (m + 1.0) / (2.0 * n * (m + 1.0) + 1.0);
            let frac = (hi - mid) / even_length(n, m);
            assert!((frac - a3_one_fraction(n, m)).abs() < 1e-12);
        }
    }
}
