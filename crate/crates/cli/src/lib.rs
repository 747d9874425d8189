//! Batch driver: TOML run configurations, the `solve`, `verify` and
//! `optimize` commands, and their output files.
//!
//! Exit codes: 0 success, 1 configuration error, 2 nonconvergence or empty
//! solution family, 3 property or certification failure.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{
    cmd_optimize, cmd_solve, cmd_verify, exit_code, Failure, RunOptions, EXIT_CONFIG,
    EXIT_NONCONVERGENCE, EXIT_OK, EXIT_PROPERTY,
};
pub use config::{OptimizeSection, RunConfig};
