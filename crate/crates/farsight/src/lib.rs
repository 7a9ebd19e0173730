//! File formats, reports, random markets and the command-line front end for
//! `farsight-core`.

pub mod cli;
pub mod dot;
pub mod fixtures;
pub mod format;
pub mod random;
pub mod report;
pub mod stats;
