//! The invariant density of the gap map and the experiments built on it.

pub mod density;
pub mod khinchin;
pub mod series;
pub mod ulam;

pub use density::{correlation_decay, indicator, stationary_density, DensityEstimate};
pub use khinchin::{khinchin_experiment, KhinchinConfig, KhinchinReport, SampleExceedance, ThresholdFamily};
pub use series::{integral_log_norm, series_bound, LogNormIntegral, SeriesBound};
pub use ulam::{build_ulam, inverse_branches, TailMode, UlamOperator};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs of the Ulam discretization. The operator is deterministic; `seed` is
/// only echoed into outputs so runs can be paired with sampled experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UlamConfig {
    pub bins: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Branch families lighter than this are summed in closed form.
    pub branch_cutoff_mass: f64,
    pub seed: u64,
}

impl Default for UlamConfig {
    fn default() -> Self {
        UlamConfig {
            bins: 512,
            tol: 1e-10,
            max_iter: 10_000,
            branch_cutoff_mass: 1e-8,
            seed: 2024,
        }
    }
}

impl UlamConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad ulam config: {e}")))
    }

    pub fn operator(&self) -> Result<UlamOperator> {
        build_ulam(self.bins, TailMode::Analytic, self.branch_cutoff_mass)
    }

    pub fn solve(&self) -> Result<(UlamOperator, DensityEstimate)> {
        let op = self.operator()?;
        let d = stationary_density(&op, self.tol, self.max_iter)?;
        Ok((op, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let c = UlamConfig::from_json(r#"{"bins": 64}"#).unwrap();
        assert_eq!(c.bins, 64);
        assert_eq!(c.tol, UlamConfig::default().tol);
        let (op, d) = c.solve().unwrap();
        let back: DensityEstimate = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        assert_eq!(op.bins, d.bins);
        assert!(UlamConfig::from_json(r#"{"bin": 64}"#).is_err());
    }
}
