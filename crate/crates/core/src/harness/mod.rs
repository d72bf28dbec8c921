//! Seeded experiment sweeps: parse a config, run every
//! `(instance, algorithm, w, seed)` combination against an offline oracle,
//! and emit fixed-format CSV or JSON rows plus a summary.

mod config;
mod report;
mod suite;

pub use config::{
    AlgorithmKind, AlgorithmSpec, BoundCheck, ExperimentConfig, InstanceSpec, OracleSpec,
    OutputFormat, OutputSpec, SeedSpec, REGISTERED_CHECKS,
};
pub use report::{format_sig, summary_path_for, rows_to_csv, rows_to_json, summary_to_json, sweep_and_report, SweepOutcome};
pub use suite::{derive_seed, grid_budget, run_suite, splitmix64, GroupSummary, ResultRow, SuiteOutput, SuiteSummary};
