// Ulam approximation of the invariant density and the log-norm integral.

use gapmap::measure::{correlation_decay, indicator, integral_log_norm, series_bound, UlamConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = UlamConfig {
        bins: 256,
        ..Default::default()
    };
    let (op, density) = cfg.solve()?;
    println!(
        "{} bins: residual {:.1e} after {} steps, density in [{:.3}, {:.3}]",
        density.bins,
        density.residual,
        density.iterations,
        density.min(),
        density.max()
    );
    let integral = integral_log_norm(&density);
    let bound = series_bound();
    println!(
        "∫ log‖M‖ dμ ≈ {:.5} (table) {:.5} (spectral)",
        integral.table, integral.spectral
    );
    println!("bound {:.9} ± {:.1e}", bound.total, bound.error_estimate);
    assert!(integral.table <= density.max() * bound.total);

    let f = indicator(cfg.bins, 0.0, 0.25);
    let decay = correlation_decay(&f, &f, &op, &density, 20);
    println!(
        "correlations at lags 1, 10, 20: {:.2e} {:.2e} {:.2e}",
        decay[1], decay[10], decay[20]
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
