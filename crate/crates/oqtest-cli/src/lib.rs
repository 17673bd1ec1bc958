//! Campaign configuration, result records, and experiment drivers behind
//! the `oqtest` command-line binary. Everything here is a library so the
//! integration tests can drive the exact code paths the binary runs.

pub mod config;
pub mod records;
pub mod runner;
