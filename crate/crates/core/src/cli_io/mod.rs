//! Configuration parsing, run orchestration and CSV output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, Diagnostic, RunConfig, SolverKind};
pub use output::{read_fields, write_fields};
pub use run::{execute, run, run_experiments, ExitStatus, RunSummary};
