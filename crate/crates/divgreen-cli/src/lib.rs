//! Command-line front end for `divgreen`: fixtures, configuration, reports and suites.

pub mod commands;
pub mod config;
pub mod fixtures;
pub mod report;
pub mod suite;
