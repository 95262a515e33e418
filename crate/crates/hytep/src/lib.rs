//! File formats, reporting and the command-line front end for the planning
//! toolkit in `hytep-core`.

pub use hytep_core;

pub mod casefile;
pub mod cli;
pub mod report;
pub mod sweep;
