//! Sparsity-adaptive p-value weighting.
//!
//! For a local signal frequency `x` and shape parameter `k > 0`, the odds map
//!
//! ```text
//! varphi_k(x) = (x / (1 - x))^(1/k)
//! ```
//!
//! drives the whole weighting family: a site's weighted p-value divides the
//! raw p-value by `varphi_k(x)` (clipped at 1), and a site's step-up
//! coefficient is `(1 - x) * varphi_k(x)`. Larger local frequency means a
//! larger weight and a smaller weighted p-value; `k -> infinity` recovers the
//! unweighted procedure.

use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::field::{PValueField, SparsityField};
use crate::fmath;

fn validate_k(k: f64) -> Result<()> {
    if !k.is_finite() || k <= 0.0 {
        return Err(CoreError::InvalidParameter { name: "k" });
    }
    Ok(())
}

fn validate_alignment(p: &PValueField, pi1: &SparsityField) -> Result<()> {
    if p.len() != pi1.len() {
        return Err(CoreError::LengthMismatch {
            expected: p.len(),
            found: pi1.len(),
        });
    }
    Ok(())
}

/// The odds map `(x / (1 - x))^(1/k)` for `x` strictly inside `(0, 1)`.
pub fn varphi(x: f64, k: f64) -> Result<f64> {
    validate_k(k)?;
    if !x.is_finite() || !(x > 0.0 && x < 1.0) {
        return Err(CoreError::NotProbability { value: x });
    }
    Ok(fmath::powf(x / (1.0 - x), 1.0 / k))
}

/// Inverse of the odds map: `y^k / (1 + y^k)` for `y >= 0`.
///
/// Saturates to 1 when `y^k` overflows.
pub fn varphi_inv(y: f64, k: f64) -> f64 {
    debug_assert!(y >= 0.0 && k > 0.0);
    let yk = fmath::powf(y, k);
    if yk.is_infinite() {
        return 1.0;
    }
    yk / (1.0 + yk)
}

/// Weighted p-values for one shape parameter, with the per-site step-up
/// coefficients that accompany them.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPValueSet {
    k: f64,
    values: Vec<f64>,
    coefficients: Vec<f64>,
    coefficient_sum: f64,
}

impl WeightedPValueSet {
    /// The shape parameter the set was built with.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Weighted p-values in site order, each clipped to at most 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-site coefficients `(1 - x) * varphi_k(x)`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Sum of the coefficients.
    pub fn coefficient_sum(&self) -> f64 {
        self.coefficient_sum
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; built from validated nonempty fields.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Computes the weighted p-values `min{ p / varphi_k(x), 1 }` together with
/// the step-up coefficients.
pub fn weighted_pvalues(
    p: &PValueField,
    pi1: &SparsityField,
    k: f64,
) -> Result<WeightedPValueSet> {
    validate_k(k)?;
    validate_alignment(p, pi1)?;
    let m = p.len();
    let mut values = Vec::with_capacity(m);
    let mut coefficients = Vec::with_capacity(m);
    let mut sum = 0.0;
    for i in 0..m {
        let x = pi1.values()[i];
        // clamped fields keep x strictly inside (0, 1)
        let odds = fmath::powf(x / (1.0 - x), 1.0 / k);
        let weighted = (p.values()[i] / odds).min(1.0);
        let coefficient = (1.0 - x) * odds;
        values.push(weighted);
        coefficients.push(coefficient);
        sum += coefficient;
    }
    Ok(WeightedPValueSet {
        k,
        values,
        coefficients,
        coefficient_sum: sum,
    })
}

/// Weighted p-values brought back to the raw p-value scale, in both the
/// global and the sitewise normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledPValues {
    /// Global factor: sum of `(1 - x)` over sites divided by the coefficient
    /// sum. Dividing every weighted p-value by it preserves their ranking.
    pub global_factor: f64,
    /// Weighted p-values divided by the global factor (not re-clipped).
    pub global: Vec<f64>,
    /// Sitewise factors `m * varphi_k(x_s) / sum_s' varphi_k(x_s')`, which
    /// average to 1 across sites.
    pub sitewise_factors: Vec<f64>,
    /// Raw p-values divided by the sitewise factors, clipped at 1.
    pub sitewise: Vec<f64>,
}

/// Computes both rescaled forms of the weighted p-values.
pub fn rescaled_pvalues(
    p: &PValueField,
    pi1: &SparsityField,
    k: f64,
) -> Result<RescaledPValues> {
    let w = weighted_pvalues(p, pi1, k)?;
    let m = p.len();
    let complement_sum: f64 = pi1.values().iter().map(|&x| 1.0 - x).sum();
    let global_factor = complement_sum / w.coefficient_sum();
    let global = w.values().iter().map(|&v| v / global_factor).collect();

    let odds_sum: f64 = pi1
        .values()
        .iter()
        .map(|&x| fmath::powf(x / (1.0 - x), 1.0 / k))
        .sum();
    let mut sitewise_factors = Vec::with_capacity(m);
    let mut sitewise = Vec::with_capacity(m);
    for i in 0..m {
        let x = pi1.values()[i];
        let odds = fmath::powf(x / (1.0 - x), 1.0 / k);
        let factor = m as f64 * odds / odds_sum;
        sitewise_factors.push(factor);
        sitewise.push((p.values()[i] / factor).min(1.0));
    }
    Ok(RescaledPValues {
        global_factor,
        global,
        sitewise_factors,
        sitewise,
    })
}

/// Upper bound on the expected number of false positives when rejecting all
/// weighted p-values at most `varphi_k(t)`:
///
/// ```text
/// sum_s (1 - x_s) * varphi_k(x_s) * varphi_k(t),    t in [0, 1)
/// ```
pub fn efp_bound(pi1: &SparsityField, k: f64, t: f64) -> Result<f64> {
    validate_k(k)?;
    if !t.is_finite() || !(0.0..1.0).contains(&t) {
        return Err(CoreError::InvalidParameter { name: "t" });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let phi_t = fmath::powf(t / (1.0 - t), 1.0 / k);
    let coeff_sum: f64 = pi1
        .values()
        .iter()
        .map(|&x| (1.0 - x) * fmath::powf(x / (1.0 - x), 1.0 / k))
        .sum();
    Ok(coeff_sum * phi_t)
}

/// Checks the moment condition under which the weighted procedure is no less
/// powerful than the unweighted one:
///
/// ```text
/// sum_s (1 - x_s) * sum_s x_s
///     >= sum_s (1 - x_s)^(1 - 1/k) x_s^(1/k) * sum_s (1 - x_s)^(1/k) x_s^(1 - 1/k)
/// ```
///
/// Compared with a tiny relative slack so that exact-equality cases (for
/// example constant fields) return true. Always true at `k = 2` by the
/// Cauchy-Schwarz inequality.
pub fn check_assumption_a4(pi1: &SparsityField, k: f64) -> bool {
    debug_assert!(k.is_finite() && k > 0.0);
    let lhs: f64 = pi1.values().iter().map(|&x| 1.0 - x).sum::<f64>()
        * pi1.values().iter().sum::<f64>();
    let a: f64 = pi1
        .values()
        .iter()
        .map(|&x| fmath::powf(1.0 - x, 1.0 - 1.0 / k) * fmath::powf(x, 1.0 / k))
        .sum();
    let b: f64 = pi1
        .values()
        .iter()
        .map(|&x| fmath::powf(1.0 - x, 1.0 / k) * fmath::powf(x, 1.0 - 1.0 / k))
        .sum();
    lhs >= a * b * (1.0 - 1e-12)
}
