pub mod cell;
pub mod cf;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod gates;
pub mod measure;
pub mod orbit;
pub mod renorm;
pub mod sampling;
mod serde_big;
pub mod trajectory;

pub use cell::{classify_cell, classify_value, PartitionCell};
pub use cf::{parity_floor, CFExpansion, ThetaSpec};
pub use error::{Error, Result};
pub use exact::ExactReal;
pub use renorm::{Letter, ReturnMatrix, SubstitutionRule, WordStats};
pub use trajectory::{gap_trajectory, GapTrajectory, LeadingQuotients};
