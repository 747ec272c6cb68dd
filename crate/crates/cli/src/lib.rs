//! Command-line front end for `geoscore`: CSV/JSON ingestion, report
//! rendering, bundled data sets and the replayable episodes.

pub mod app;
pub mod error;
pub mod fixtures;
pub mod ingest;
pub mod replay;
pub mod report;

pub use app::{run, Cli, Outcome};
pub use error::{CliError, Result};
pub use ingest::{ingest_performance, ingest_races, IngestOptions, PerformanceFile, RaceFile};
pub use report::{Format, Report};
