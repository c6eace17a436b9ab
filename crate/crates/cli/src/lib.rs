//! Command implementations and report plumbing for the `av1324` binary.

pub mod commands;
pub mod report;
pub mod suites;
