// Exact orbit coding of x ↦ x + θ and the discrepancy ρ_N, checked against
// the level words.

use gapmap::orbit::{discrepancy_profile, encode_orbit, sandwich_check};
use gapmap::{CFExpansion, ExactReal};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let theta = CFExpansion::periodic(&[], &[2])?;
    let enc = encode_orbit(&ExactReal::ratio(1, 3), &theta.value(), 2000)?;
    let prof = discrepancy_profile(&enc);
    println!(
        "ρ at N = 10, 100, 2000: {} {} {}",
        prof.rho[9], prof.rho[99], prof.rho[1999]
    );

    let report = sandwich_check(&ExactReal::ratio(2, 7), &theta, 5)?;
    println!("{report:?}");
    assert!(report.holds());

    let mut csv = Vec::new();
    prof.write_csv(&mut csv)?;
    assert!(String::from_utf8(csv)?.starts_with("i,S_i,rho_i"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
