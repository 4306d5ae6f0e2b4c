// For θ = √2 − 1 the discrepancy grows like log N.

use gapmap::experiments::{level_growth, run_bounded_pq_check, summarize_bounded, ExperimentConfig};
use gapmap::CFExpansion;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig {
        orbit_len: 30_000,
        ..Default::default()
    };
    let rows = run_bounded_pq_check(&cfg)?;
    for s in summarize_bounded(&rows) {
        println!("x = {}: ρ_N/log N in [{:.3}, {:.3}]", s.x, s.min_ratio, s.max_ratio);
    }
    let lv = level_growth(&CFExpansion::periodic(&[], &[2])?, 30)?;
    println!("half-sum / log|Ω30| = {:.4}", lv[29].ratio);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
