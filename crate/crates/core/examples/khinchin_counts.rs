// How often E(a₁(θᵢ)) beats n versus n log²n along random orbits.

use gapmap::measure::{khinchin_experiment, KhinchinConfig, ThresholdFamily};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for family in [ThresholdFamily::Linear, ThresholdFamily::LogSquared] {
        let cfg = KhinchinConfig::new(family, 16, 50, 400, 11);
        let report = khinchin_experiment(&cfg)?;
        println!(
            "{family}: window ends {:?}, medians {:?}",
            report.ends, report.median_at
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
