//! Config-driven benchmark runs and their CSV output.

pub mod config;
pub mod expr;
pub mod output;
pub mod run;

pub use config::{parse_config, InitialData, IntegratorKind, ModelKind, RunConfig};
pub use output::{format_value, read_table, write_csv, write_table, Table};
pub use run::{compare, converge, simulate, Comparison, ConvergeReport, Model, Simulation, DEFAULT_ORACLE_REFINE};
