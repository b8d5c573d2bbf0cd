//! Harness library behind the `graspscene` binary: configuration loading,
//! JSON detection records, the timed per-frame pipeline, the evaluation
//! experiments, and the throughput benchmark.
//!
//! Everything here is also a library API so integration and acceptance
//! tests can drive experiments directly without shelling out.

pub mod bench;
pub mod config;
pub mod experiments;
pub mod pipeline;
pub mod record;
