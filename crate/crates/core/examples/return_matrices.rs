// Return-time matrices, their products, and the two eigenvalue readings.

use gapmap::renorm::{level_lengths, lyapunov_estimate, orbit_matrices, spectral_radius_for, top_eigenvalue};
use gapmap::trajectory::leading_quotients;
use gapmap::CFExpansion;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let theta = CFExpansion::periodic(&[], &[2, 3, 1])?;
    let mats = orbit_matrices(&theta, 6)?;
    let lens = level_lengths(&mats);
    for (i, (m, q)) in mats.iter().zip(leading_quotients(&theta, 6)?).enumerate() {
        println!(
            "M{i} = {m}  det {}  radius {:.4}  table {:.4}",
            m.det(),
            spectral_radius_for(&q)?,
            top_eigenvalue(&q)?
        );
        assert!(m.det() == 1.into() || m.det() == (-1).into());
    }
    println!("|Ω6| = {}, |σ⁽⁶⁾(C)| = {}", lens[6][0], lens[6][1]);
    println!("λ estimate at level 60: {:.4}", lyapunov_estimate(&theta, 60)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
