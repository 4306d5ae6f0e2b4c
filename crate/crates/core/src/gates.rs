//! Pass/fail checks with pinned sample sizes, seeds and tolerances. The CLI's
//! `verify` verb and the acceptance test both run these.

use std::time::Instant;

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

use crate::cf::CFExpansion;
use crate::error::Result;
use crate::exact::ExactReal;
use crate::measure::{
    build_ulam, integral_log_norm, khinchin_experiment, series_bound, stationary_density, KhinchinConfig, TailMode,
    ThresholdFamily,
};
use crate::orbit::{sandwich_levels, verify_special_encoding};
use crate::renorm::{
    check_prop_growth, expand_word, level_lengths, level_stats, lyapunov_estimate, orbit_matrices, orbit_rules,
    xi_profile, Letter, WordStats, CALIBRATED_RANGE,
};
use crate::sampling::{sample_rng, theta_samples, theta_samples_below_half};
use crate::trajectory::gap_trajectory;

pub const GATE_SEED: u64 = 20_240_917;

pub const XI_BOUND: i64 = 5;
pub const ORACLE_WORD_LIMIT: u64 = 100_000;
pub const ENCODING_GATE_WORD_LIMIT: u64 = 10_000;
/// Orbit length budget that decides which levels are feasible.
pub const SANDWICH_GATE_BUDGET: u64 = 200_000;
pub const GROWTH_BAND: f64 = 0.2;
pub const LYAPUNOV_SLACK: f64 = 0.05;
pub const DECAY_SLACK: f64 = 1e-12;

pub const ULAM_BINS: usize = 512;
pub const ULAM_TOL: f64 = 1e-10;
pub const ULAM_MAX_ITER: usize = 10_000;
pub const ULAM_CUTOFF_MASS: f64 = 1e-8;
pub const MIN_DENSITY: f64 = 1e-3;
pub const L1_REFINEMENT: f64 = 5e-2;
pub const SERIES_REL_ERROR: f64 = 1e-6;

pub const KHINCHIN_SAMPLES: usize = 200;
pub const KHINCHIN_WINDOW: (usize, usize) = (100, 5000);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateVerdict {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: Option<f64>,
}

impl std::fmt::Display for GateVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<22} {} ({:.2}s",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )?;
        if let Some(l) = self.limit_seconds {
            write!(f, " of {l:.0}s")?;
        }
        write!(f, ")")
    }
}

pub const GATE_NAMES: [&str; 11] = [
    "renormalization",
    "return-lengths",
    "oracle-equivalence",
    "special-encoding",
    "sandwich",
    "word-growth",
    "lyapunov-floor",
    "invariant-density",
    "integrability",
    "khinchin-dichotomy",
    "delta-decay",
];

const LIMITS: [Option<f64>; 11] = [
    Some(10.0),
    Some(5.0),
    Some(60.0),
    Some(300.0),
    None,
    None,
    None,
    Some(60.0),
    None,
    None,
    None,
];

/// Runs gate `id` (1 to 11). Errors inside a gate count as failure.
pub fn run_gate(id: u8) -> GateVerdict {
    assert!((1..=11).contains(&id), "gates are numbered 1 to 11");
    let start = Instant::now();
    let outcome = match id {
        1 => renormalization_gate(),
        2 => return_length_gate(),
        3 => oracle_gate(),
        4 => encoding_gate(),
        5 => sandwich_gate(),
        6 => word_growth_gate(),
        7 => lyapunov_gate(),
        8 => density_gate(),
        9 => integrability_gate(),
        10 => khinchin_gate(),
        _ => decay_gate(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let limit = LIMITS[id as usize - 1];
    let (mut passed, mut detail) = match outcome {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(l) = limit {
        if seconds > l {
            passed = false;
            detail.push_str("; over time limit");
        }
    }
    GateVerdict {
        id,
        name: GATE_NAMES[id as usize - 1],
        passed,
        detail,
        seconds,
        limit_seconds: limit,
    }
}

pub fn run_all() -> Vec<GateVerdict> {
    (1..=11).map(run_gate).collect()
}

type Outcome = Result<(bool, String)>;

fn samples(count: usize, levels: usize) -> Vec<CFExpansion> {
    theta_samples(GATE_SEED, count, (2 * levels + 3).max(30))
}

/// `|ρ(Ωₙ) − ½ΣE(a₁(θᵢ))| ≤ 5`, 100 samples, `n ≤ 20`.
fn renormalization_gate() -> Outcome {
    let mut worst = 0i64;
    let mut failures = 0;
    for th in samples(100, 20) {
        for id in xi_profile(&th, 20, CALIBRATED_RANGE)? {
            let xi: i64 = (&id.xi).try_into().unwrap_or(i64::MAX);
            worst = worst.max(xi.abs());
            if xi.abs() > XI_BOUND {
                failures += 1;
            }
        }
    }
    Ok((
        failures == 0,
        format!("max |xi| = {worst} over 100 x 21 levels, {failures} above {XI_BOUND}"),
    ))
}

/// Stats lengths equal `M⁽ⁿ⁾[1 1]ᵗ` and `|σ⁽ⁿ⁾(A)| = |σ⁽ⁿ⁾(B)|`, `n ≤ 30`.
fn return_length_gate() -> Outcome {
    let mut bad = 0;
    let count = 100;
    for th in samples(count, 30) {
        let levels = level_stats(&orbit_rules(&th, 30)?);
        let lens = level_lengths(&orbit_matrices(&th, 30)?);
        for n in 0..=30 {
            let [a, b, c] = &levels[n];
            if a.len != lens[n][0] || c.len != lens[n][1] || a.len != b.len {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{count} samples x 31 levels, {bad} mismatches")))
}

fn brute_stats(word: &[Letter]) -> WordStats {
    let mut s = 0i64;
    let (mut hi, mut lo) = (i64::MIN, i64::MAX);
    for l in word {
        s += l.weight();
        hi = hi.max(s);
        lo = lo.min(s);
    }
    if word.is_empty() {
        return WordStats::empty();
    }
    WordStats {
        len: BigInt::from(word.len()),
        sum: BigInt::from(s),
        maxp: BigInt::from(hi),
        minp: BigInt::from(lo),
    }
}

/// Folded stats against explicit words, every level with `|σ⁽ⁿ⁾(*)| ≤ 10⁵`.
fn oracle_gate() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for th in samples(100, 40) {
        let rules = orbit_rules(&th, 40)?;
        let levels = level_stats(&rules);
        for n in 0..=40 {
            let mut any = false;
            for l in Letter::ALL {
                if levels[n][l.index()].len > BigInt::from(ORACLE_WORD_LIMIT) {
                    continue;
                }
                any = true;
                let word = expand_word(&rules[..n], l, ORACLE_WORD_LIMIT)?;
                checked += 1;
                if brute_stats(&word) != levels[n][l.index()] {
                    bad += 1;
                }
            }
            if !any {
                break;
            }
        }
    }
    Ok((
        bad == 0 && checked > 0,
        format!("{checked} words compared, {bad} mismatches"),
    ))
}

/// A grid point codes `Ωₙ` with at most two errors, 20 samples, largest `n`
/// with `|Ωₙ| ≤ 10⁴`.
fn encoding_gate() -> Outcome {
    let mut worst = 0;
    let mut levels = Vec::new();
    for th in theta_samples_below_half(GATE_SEED, 20, 60) {
        let lens = level_lengths(&orbit_matrices(&th, 25)?);
        let n = (0..=25)
            .take_while(|&n| lens[n][0] <= BigInt::from(ENCODING_GATE_WORD_LIMIT))
            .last()
            .unwrap_or(0);
        let m = verify_special_encoding(&th, n, 1)?;
        worst = worst.max(m.mismatches);
        levels.push(n);
    }
    Ok((
        true,
        format!(
            "20 samples matched at levels {}..={}, worst {worst} mismatches",
            levels.iter().min().unwrap_or(&0),
            levels.iter().max().unwrap_or(&0)
        ),
    ))
}

/// `ρ_N(y)` sits between the level bounds for 50 random `y` per `θ`,
/// 10 samples, every level whose orbit fits the budget.
fn sandwich_gate() -> Outcome {
    let mut checks = 0;
    let mut bad = 0;
    for (i, th) in theta_samples_below_half(GATE_SEED, 10, 90).iter().enumerate() {
        let mut rng = sample_rng(GATE_SEED ^ 0x5a5a, i as u64);
        for _ in 0..50 {
            let y = ExactReal::ratio(rng.gen_range(0..1i64 << 32), 1i64 << 32);
            for r in sandwich_levels(&y, th, 40, SANDWICH_GATE_BUDGET)? {
                checks += 1;
                if !r.holds() {
                    bad += 1;
                }
            }
        }
    }
    Ok((
        bad == 0 && checks > 0,
        format!("{checks} (y, n) checks, {bad} failures"),
    ))
}

/// `min level n ≥ max level n − 3` for `3 ≤ n ≤ 30`, and the level-30
/// growth rate within 0.2 of the estimate.
fn word_growth_gate() -> Outcome {
    let mut lag = 0;
    let mut band = 0;
    for th in samples(100, 30) {
        let r = check_prop_growth(&th, 30, GROWTH_BAND)?;
        lag += usize::from(!r.all_lag_inequalities_hold());
        band += usize::from(!r.band_ok);
    }
    Ok((
        lag + band == 0,
        format!("100 samples, {lag} lag failures, {band} outside the band"),
    ))
}

/// Depth-50 estimates at least `log √2 − 0.05`.
fn lyapunov_gate() -> Outcome {
    let floor = 2f64.sqrt().ln() - LYAPUNOV_SLACK;
    let mut min = f64::INFINITY;
    for th in samples(100, 50) {
        min = min.min(lyapunov_estimate(&th, 50)?);
    }
    Ok((min >= floor, format!("min estimate {min:.4} vs floor {floor:.4}")))
}

/// Stationary density at 512 bins: residual, positivity, mass of `(1/2, 1)`
/// and agreement with 1024 bins.
fn density_gate() -> Outcome {
    let op = build_ulam(ULAM_BINS, TailMode::Analytic, ULAM_CUTOFF_MASS)?;
    let d = stationary_density(&op, ULAM_TOL, ULAM_MAX_ITER)?;
    let fine = stationary_density(
        &build_ulam(2 * ULAM_BINS, TailMode::Analytic, ULAM_CUTOFF_MASS)?,
        ULAM_TOL,
        ULAM_MAX_ITER,
    )?;
    let half = d.mass_upper_half();
    let half_bound = 0.5 + 2.0 / ULAM_BINS as f64;
    let l1 = d.l1_distance(&fine);
    let ok = d.residual <= ULAM_TOL && d.min() >= MIN_DENSITY && half <= half_bound && l1 <= L1_REFINEMENT;
    Ok((
        ok,
        format!(
            "residual {:.1e}, min {:.4}, mu(1/2,1) {half:.4} <= {half_bound:.4}, L1(512,1024) {l1:.1e}",
            d.residual,
            d.min()
        ),
    ))
}

/// Lebesgue series to relative error `10⁻⁶`, and `∫log‖M‖dμ ≤ sup f · series`.
fn integrability_gate() -> Outcome {
    let s = series_bound();
    let op = build_ulam(ULAM_BINS, TailMode::Analytic, ULAM_CUTOFF_MASS)?;
    let d = stationary_density(&op, ULAM_TOL, ULAM_MAX_ITER)?;
    let i = integral_log_norm(&d);
    let cap = i.max_density * s.total;
    let ok = s.total.is_finite() && s.relative_error() <= SERIES_REL_ERROR && i.table.is_finite() && i.table <= cap;
    Ok((
        ok,
        format!(
            "series {:.9} (rel err {:.1e}), integral {:.6} <= {:.6}",
            s.total,
            s.relative_error(),
            i.table,
            cap
        ),
    ))
}

/// Median exceedances over `[100, 5000]`: none for `n (log(n+2))²`, at least
/// three and growing with the window for `n`.
fn khinchin_gate() -> Outcome {
    let (lo, hi) = KHINCHIN_WINDOW;
    let sum = khinchin_experiment(&KhinchinConfig::new(
        ThresholdFamily::LogSquared,
        KHINCHIN_SAMPLES,
        lo,
        hi,
        GATE_SEED,
    ))?;
    let div = khinchin_experiment(&KhinchinConfig::new(
        ThresholdFamily::Linear,
        KHINCHIN_SAMPLES,
        lo,
        hi,
        GATE_SEED,
    ))?;
    let ok = sum.median_count == 0.0 && div.median_count >= 3.0 && div.median_increases();
    Ok((
        ok,
        format!(
            "summable median {}, divergent medians {:?} at window ends {:?}",
            sum.median_count, div.median_at, div.ends
        ),
    ))
}

/// `|log(δ₀⋯δₙ₋₁)|/n ≥ (log 2)/2 − (log 2)/n` for `2 ≤ n ≤ 30`.
fn decay_gate() -> Outcome {
    let ln2 = std::f64::consts::LN_2;
    let mut bad = 0;
    let mut margin = f64::INFINITY;
    for th in samples(100, 30) {
        let t = gap_trajectory(&th, 30)?;
        for n in 2..=30 {
            let rate = t.decay_rate(n);
            let floor = ln2 / 2.0 - ln2 / n as f64;
            margin = margin.min(rate - floor);
            if rate < floor - DECAY_SLACK {
                bad += 1;
            }
        }
    }
    Ok((
        bad == 0,
        format!("100 samples x 29 levels, {bad} failures, min margin {margin:.4}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_stats_examples() {
        use Letter::*;
        let s = brute_stats(&[A, A, C, B, A]);
        assert_eq!(s.rho(), BigInt::from(3));
        assert_eq!(s.sum, BigInt::from(1));
        assert_eq!(brute_stats(&[]), WordStats::empty());
    }

    #[test]
    fn quick_gates_pass() {
        for id in [1, 2, 6, 7, 11] {
            let v = run_gate(id);
            assert!(v.passed, "{v}");
        }
    }
}
