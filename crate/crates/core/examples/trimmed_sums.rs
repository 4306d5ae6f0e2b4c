// Dropping the largest quotient from the half-sum.

use gapmap::experiments::trimmed::trimmed_records;
use gapmap::sampling::theta_samples;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (i, th) in theta_samples(5, 3, 403).iter().enumerate() {
        let rows = trimmed_records(th, &[50, 100, 200], i)?;
        for r in &rows {
            println!(
                "sample {i} n {:>3}: trimmed/(n log n) {:.3}, untrimmed {:.3}",
                r.n, r.ratio, r.untrimmed_ratio
            );
            assert!(r.ratio <= r.untrimmed_ratio);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
