//! Simulation harness and command-line front end for spatially weighted
//! false discovery rate procedures.
//!
//! The library half of this crate (usable without the binary) provides:
//!
//! * [`scenario`] — named simulation scenarios with their lattice layouts;
//! * [`replicate`] — single-replication data generation and per-method
//!   execution;
//! * [`harness`] — multi-replication Monte Carlo runs with serial and
//!   thread-pool execution and summary statistics;
//! * [`fileio`] — CSV/JSON serialization with atomic writes and exact float
//!   round-tripping;
//! * [`analyze`], [`estimate`], [`simulate`] — the three subcommands;
//! * [`errors`] — the process exit-code contract.

pub mod analyze;
pub mod errors;
pub mod estimate;
pub mod fileio;
pub mod harness;
pub mod replicate;
pub mod scenario;
pub mod simulate;
