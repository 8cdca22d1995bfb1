//! Run configuration, reproducible output and the acceptance checks.

pub mod acceptance;
mod meta;
mod store;
mod table;

pub use meta::{
    config_hash, git_describe, with_workers, OutputFormat, RunConfig, RunMeta, SCHEMA_VERSION,
    WORKERS_ENV,
};
pub use store::{ResultStore, RunLogEntry};
pub use table::{error_table, scan_table, sweep_table, Table};
