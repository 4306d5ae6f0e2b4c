//! Table-driven substitutions, their word statistics and return matrices.

pub mod identity;
pub mod matrix;
pub mod rule;
pub mod stats;

pub use identity::{
    monotone_levels, renorm_identity, renorm_identity_with, renorm_report, xi_profile, HalfsumRange, MonotoneRow,
    RenormIdentity, RenormRecord, CALIBRATED_RANGE,
};
pub use matrix::{
    check_prop_growth, level_lengths, lyapunov_estimate, matrix_product, matrix_product_lengths, orbit_matrices,
    spectral_radius_for, top_eigenvalue, GrowthReport, GrowthRow, ReturnMatrix,
};
pub use rule::{compose_stats, expand_word, level_stats, RuleCase, Segment, SubstitutionRule};
pub use stats::{run_length, Letter, WordStats};

use crate::cf::CFExpansion;
use crate::error::Result;
use crate::trajectory::leading_quotients;

/// `σ(θ₀), …, σ(θ_{n−1})` along the gap orbit.
pub fn orbit_rules(theta: &CFExpansion, n: usize) -> Result<Vec<SubstitutionRule>> {
    leading_quotients(theta, n)?
        .iter()
        .map(SubstitutionRule::from_quotients)
        .collect()
}
