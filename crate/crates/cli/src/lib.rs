//! Library side of the CLI: job files, the pipeline, sweeps, and reports.

pub mod job;
pub mod pipeline;
pub mod report;
pub mod sweep;
