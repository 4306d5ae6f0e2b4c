// Running maximum of ρ(Ωₙ)/(n log n).

use gapmap::experiments::{run_limsup_probe, summarize_limsup, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig {
        samples: 6,
        depth: 60,
        ..Default::default()
    };
    let rows = run_limsup_probe(&cfg)?;
    for s in summarize_limsup(&rows) {
        println!(
            "sample {}: running max {:.3}, rose late {}",
            s.sample, s.final_max, s.increased_late
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
