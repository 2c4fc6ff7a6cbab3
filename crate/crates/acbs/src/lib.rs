//! Command line, JSON formats, example generators and randomized invariant
//! suites on top of `acbs-core`.

pub mod cli;
pub mod examples;
pub mod json;
pub mod pipeline;
pub mod suites;
