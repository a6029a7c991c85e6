//! Benchmark harness, file formats and HTTP session service built on
//! `segbench-core`.

pub mod config;
pub mod dataset;
pub mod error;
pub mod external;
pub mod harness;
pub mod io;
pub mod report;
pub mod service;

pub use error::{BenchError, Result};
pub use segbench_core as core;
