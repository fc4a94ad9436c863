//! File formats, dataset handling, benchmarking and the `lerpgan` command
//! line on top of `lerpgan-core`.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod data;
pub mod fetch;
pub mod metrics;
pub mod pgm;
