// Level words σ⁽ⁿ⁾(A) and their prefix statistics, with and without expansion.

use gapmap::renorm::{compose_stats, expand_word, orbit_rules, run_length};
use gapmap::{CFExpansion, Letter, WordStats};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let theta = CFExpansion::periodic(&[4, 3], &[2, 5])?;
    let rules = orbit_rules(&theta, 4)?;
    for (i, r) in rules.iter().enumerate() {
        println!("σ{i}: {:?}", r.case());
    }
    let word = expand_word(&rules, Letter::A, 100_000)?;
    let stats = compose_stats(&rules, Letter::A);
    // the monoid never needs the word itself
    assert_eq!(WordStats::of_word(&word), stats);
    println!("|Ω4| = {}, ρ = {}", stats.len, stats.rho());
    println!("{}", &run_length(&word)[..60.min(run_length(&word).len())]);

    let deep = orbit_rules(&theta, 40)?;
    let s = compose_stats(&deep, Letter::A);
    println!("|Ω40| has {} digits, ρ = {}", s.len.to_string().len(), s.rho());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
