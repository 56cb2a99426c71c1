//! Experiment runner for the elasticity preconditioner: table reproduction,
//! property verification and report generation.

pub mod config;
pub mod error;
pub mod experiment;
pub mod reference;
pub mod report;
pub mod verify;

pub use config::{parse_levels, parse_nu_values, parse_pairs, ExperimentConfig, ReportFormat};
pub use error::BenchError;
pub use experiment::{run_table_experiment, BenchResult, CellResult};
pub use report::emit_report;
pub use verify::{run_verification_suite, VerificationSummary};
