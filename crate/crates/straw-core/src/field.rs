//! Validated per-site value containers.

use alloc::vec::Vec;

use crate::error::{CoreError, Result};

/// Default clamp applied to local signal-frequency fields, keeping every
/// value inside `[clip, 1 - clip]` so odds ratios stay finite.
pub const DEFAULT_CLIP: f64 = 1e-3;

/// Per-site p-values, validated to be finite and within `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueField {
    values: Vec<f64>,
}

impl PValueField {
    /// Validates and wraps a vector of p-values (must be nonempty).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(CoreError::Empty);
        }
        for &v in &values {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(CoreError::NotProbability { value: v });
            }
        }
        Ok(PValueField { values })
    }

    /// The p-values in site order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; fields are validated nonempty.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-site local signal frequencies, clamped away from 0 and 1.
///
/// The weighting formulas divide by both the frequency and its complement,
/// so raw inputs (including exact 0 or 1 from oracle layouts or degenerate
/// estimates) are clamped into `[clip, 1 - clip]` at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityField {
    values: Vec<f64>,
    clip: f64,
}

impl SparsityField {
    /// Clamps each value into `[clip, 1 - clip]` and wraps the result.
    ///
    /// `clip` must lie strictly inside `(0, 0.5)`; values must be finite
    /// (any finite value is accepted and clamped).
    pub fn clamped(values: Vec<f64>, clip: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(CoreError::Empty);
        }
        if !clip.is_finite() || !(clip > 0.0 && clip < 0.5) {
            return Err(CoreError::InvalidParameter { name: "clip" });
        }
        let mut clamped = values;
        for v in &mut clamped {
            if !v.is_finite() {
                return Err(CoreError::NotProbability { value: *v });
            }
            *v = v.clamp(clip, 1.0 - clip);
        }
        Ok(SparsityField {
            values: clamped,
            clip,
        })
    }

    /// The clamped frequencies in site order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The clamp used at construction.
    pub fn clip(&self) -> f64 {
        self.clip
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; fields are validated nonempty.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
