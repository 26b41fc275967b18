//! Standard normal distribution helpers.
//!
//! Everything is built on the complementary error function, which stays
//! accurate deep into the tails where naive `1 - cdf` arithmetic loses all
//! precision. The quantile function inverts the tail probability with a
//! safeguarded Newton iteration instead of a fixed rational approximation.

use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{CoreError, Result};
use crate::fmath;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Density of the standard normal distribution at `x`.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * fmath::exp(-0.5 * x * x)
}

/// Cumulative distribution function of the standard normal distribution.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper-tail probability `P(Z > x)`, accurate for large `x`.
#[inline]
pub fn survival(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Two-sided tail probability `P(|Z| >= |x|)` of a standard normal score.
#[inline]
pub fn two_sided_p(x: f64) -> f64 {
    libm::erfc(x.abs() * FRAC_1_SQRT_2)
}

/// Quantile (inverse CDF) of the standard normal distribution.
///
/// Requires `p` strictly inside `(0, 1)`; the boundary values map to infinite
/// quantiles and are rejected.
///
/// The implementation reflects `p` onto the upper tail, starts from the
/// asymptotic tail expansion, and polishes with Newton steps on the log of
/// the survival function. The log transform keeps the iteration stable when
/// the tail probability spans hundreds of orders of magnitude.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CoreError::NotProbability { value: p });
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve survival(x) = q on the upper tail (q <= 1/2, x >= 0).
    let q = p.min(1.0 - p);
    let mut x = if q >= 0.45 {
        // near the center the CDF is almost linear with slope 1/sqrt(2*pi)
        (0.5 - q) / INV_SQRT_2PI
    } else {
        fmath::sqrt(-2.0 * fmath::ln(q))
    };
    for _ in 0..60 {
        let s = survival(x);
        if s <= 0.0 {
            // beyond erfc underflow; cannot refine further
            break;
        }
        let step = fmath::ln(s / q) * s / normal_pdf(x);
        x += step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(if p < 0.5 { -x } else { x })
}
