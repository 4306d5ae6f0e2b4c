// Follow θ = √2 − 1 and a finite expansion through the gap map.

use gapmap::{classify_cell, gap_trajectory, CFExpansion, ThetaSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let silver: CFExpansion = "cfper:[][2]".parse::<ThetaSpec>()?.expansion()?;
    let t = gap_trajectory(&silver, 5)?;
    for (i, s) in t.entries.iter().enumerate() {
        println!(
            "θ{i} = {}  cell {}  δ = {}",
            s.cf.spec(),
            classify_cell(&s.cf)?,
            s.delta
        );
    }
    // a₁ = 2 every step, so δ = 3 − 2√2 and the rate is log(3 + 2√2)
    let rate = t.decay_rate(5);
    assert!((rate - (3.0 + 2.0 * 2f64.sqrt()).ln()).abs() < 1e-12);

    // finite expansions stop when a step runs out of quotients
    let short = CFExpansion::finite(&[3, 1, 4])?;
    assert!(gap_trajectory(&short, 4).is_err());
    let ok = gap_trajectory(&short, 1)?;
    println!("{} -> {}", ok.entries[0].cf.spec(), ok.entries[1].cf.spec());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
