// The fast acceptance gates. `gapmap verify` runs all of them.

use gapmap::gates::run_gate;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut failed = 0;
    for id in [1, 2, 6, 7, 11] {
        let v = run_gate(id);
        println!("{v}");
        failed += usize::from(!v.passed);
    }
    if failed > 0 {
        return Err(format!("{failed} gates failed").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
