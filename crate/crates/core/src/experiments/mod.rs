//! Seeded experiment drivers and their file output.

pub mod bounded;
pub mod config;
pub mod emit;
pub mod growth;
pub mod limsup;
pub mod trimmed;

pub use bounded::{level_growth, run_bounded_pq_check, summarize_bounded, BoundedPqRecord, BoundedPqSummary};
pub use config::{decimal_to_rational, parse_theta_arg, ExperimentConfig};
pub use emit::{emit, emit_plot, read_csv, read_json, render, Format, OutputMeta, VERSION};
pub use growth::{run_growth_experiment, summarize_growth, GrowthRecord, GrowthSummary, IteratedLog};
pub use limsup::{run_limsup_probe, summarize_limsup, LimsupRecord, LimsupSummary};
pub use trimmed::{run_trimmed_sums, summarize_trimmed, TrimmedRecord, TrimmedSummary};
