//! Instance files, known instances, random generation and bound reports.

pub mod generate;
pub mod instance;
pub mod named;
pub mod report;
pub mod sweep;

pub use generate::generate_random;
pub use instance::Instance;
pub use named::{ex51_certificate, named_instance};
pub use report::{run_ratio_experiment, run_ratio_experiment_with, BoundReport, SpeOutcome, SpeSummary, CSV_HEADER};
pub use sweep::{run_sweep, SweepConfig, SweepSummary};
