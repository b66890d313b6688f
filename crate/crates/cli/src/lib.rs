//! Command-line front end: configuration, runs, sweeps and reporting.

pub mod cli;
pub mod commands;
pub mod config;
pub mod convert;
pub mod runner;
