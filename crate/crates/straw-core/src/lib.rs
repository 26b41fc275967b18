//! Spatially adaptive multiple testing with false discovery rate control.
//!
//! The library provides the building blocks for large-scale testing problems
//! where hypotheses sit on a regular lattice and signals cluster in space:
//!
//! * [`lattice`] — integer lattice geometry: sites, row-major indexing, and
//!   Euclidean neighborhoods;
//! * [`field`] — validated per-site value containers for p-values and local
//!   signal frequencies;
//! * [`sparsity`] — estimation of the local signal frequency from observed
//!   p-values via a z-transform, a kernel density estimate of the local false
//!   discovery rate, and kernel-smoothed neighborhood averaging;
//! * [`weighting`] — the family of sparsity-adaptive p-value weights indexed
//!   by a shape parameter `k`, together with rescaled variants, an expected
//!   false positive bound, and a moment-condition checker;
//! * [`procedures`] — step-up testing procedures over raw, weighted, and
//!   rescaled p-values, each in two provably equivalent forms (ranking-based
//!   and threshold-sweep), plus data-driven selection of the shape parameter;
//! * [`normal`] — standard normal distribution helpers built on the
//!   complementary error function.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature simply switches float math to the standard library intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod field;
mod fmath;
pub mod lattice;
pub mod normal;
pub mod procedures;
pub mod sparsity;
pub mod weighting;

pub use error::{CoreError, Result};
