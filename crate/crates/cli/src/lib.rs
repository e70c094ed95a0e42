//! Benchmark front end for rrc-core: dataset ingestion, campaign
//! configuration and execution, result aggregation, rank comparison
//! reports, and radar charts.

pub mod campaign;
pub mod cfs;
pub mod config;
pub mod ingest;
pub mod radar;
pub mod report;
