//! Calibrated internal and external cluster validation.
//!
//! The crate computes a battery of internal validation indexes for any
//! partition of a numeric dataset, standardizes them against ensembles of
//! random clusterings, compares partitions with a reference via ARI, VI and
//! BCubed, and drives whole benchmarks from a configuration file.

pub mod calibrate;
pub mod cluster;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod external;
pub mod harness;
pub mod indexes;

pub use error::{Error, Result};
