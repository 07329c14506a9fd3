//! Experiment harness around the `quorum` committee classifier: dataset
//! manifests and CSV loading, run configuration, the multi-seed benchmark
//! runner, report formatting and a text format for fitted committees.

pub mod committee_file;
pub mod config;
pub mod csv_io;
pub mod fetch;
pub mod harness;
pub mod manifest;
pub mod report;
