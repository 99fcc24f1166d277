//! Experiment driver: config parsing, sweeps with CSV output, the
//! verification suite, problem files and the command-line front end.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod filter;
pub mod problem_file;
pub mod verify;

pub use config::{ExperimentConfig, ProblemSource, TimingMode};
pub use experiment::{match_eigenvalues, run_experiment, ExperimentReport, Matching, ReportRow, CSV_HEADER};
pub use filter::{filter_csv, Axis};
pub use problem_file::{load_problem, read_problem, save_problem, write_problem};
pub use verify::{verify_suite, CheckStatus, VerifyConfig, VerifyReport};
