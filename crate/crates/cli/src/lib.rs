//! Library half of the `hopial` command: configuration, parsing, execution
//! and report/plot emitters.

pub mod config;
pub mod parse;
pub mod plot;
pub mod report;
pub mod run;
pub mod suite;
