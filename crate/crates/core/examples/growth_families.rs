// ρ(Ωₙ) against f(n) = n log n and its primitive F, over a few seeded θ.

use gapmap::experiments::{run_growth_experiment, summarize_growth, ExperimentConfig, IteratedLog};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig {
        samples: 4,
        depth: 40,
        ..Default::default()
    };
    let family = IteratedLog::new(2, 0.0)?;
    let rows = run_growth_experiment(&cfg, &family)?;
    for s in summarize_growth(&rows) {
        println!(
            "sample {}: max ρ/f {:.2}, max ρ/F {:.3}, settled {}",
            s.sample, s.max_rho_over_f, s.max_rho_over_F, s.F_ratio_settled
        );
    }
    let sq = IteratedLog::new(2, 1.0)?;
    println!("x log²x summable: {}, F(100) = {:.3}", sq.summable(), sq.F(100.0)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
