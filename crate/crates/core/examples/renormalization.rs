// ρ(Ωₙ) against the half-sum of E(a₁(θᵢ)) for a sampled θ.

use gapmap::renorm::renorm_report;
use gapmap::sampling::theta_samples;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let theta = &theta_samples(7, 1, 60)[0];
    let rows = renorm_report(theta, 20)?;
    println!("θ = {}", theta.spec());
    for r in rows.iter().step_by(4) {
        println!(
            "n {:>2}  ρ {:>6}  half-sum {:>6}  ξ {:>2}  λ ≈ {:.3}",
            r.n, r.rho, r.halfsum, r.xi, r.lyap_estimate
        );
    }
    let worst = rows.iter().map(|r| r.xi.parse::<i64>().unwrap().abs()).max().unwrap();
    assert!(worst <= 5);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
