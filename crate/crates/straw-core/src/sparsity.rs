//! Estimation of the local signal frequency from observed p-values.
//!
//! The pipeline has two stages:
//!
//! 1. **Local false discovery rate.** Two-sided p-values are mapped to
//!    nonnegative z-scores, the null fraction is estimated from the share of
//!    p-values above 1/2, and the marginal z-density is estimated with a
//!    Gaussian kernel density estimate over the *symmetrized* score sample
//!    (each score enters with both signs). Symmetrizing makes the standard
//!    normal the exact null density of the statistic being smoothed and
//!    removes the boundary bias at zero.
//! 2. **Neighborhood smoothing.** The complement `1 - Lfdr` is averaged over
//!    a truncated kernel neighborhood on the lattice, yielding a per-site
//!    signal-frequency estimate, clamped away from 0 and 1.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::field::{PValueField, SparsityField};
use crate::fmath;
use crate::lattice::{ball_offsets, Lattice};
use crate::normal;

/// Smallest p-value used in the z-transform; anything below is floored so
/// the transform stays finite.
pub const P_FLOOR: f64 = 1e-15;

/// Window half-width for kernel density evaluation, in bandwidths. Terms
/// beyond it are below 3e-18 of the peak and are skipped.
const KDE_WINDOW: f64 = 9.0;

/// Shape of the smoothing kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// `exp(-d^2 / (2 h^2))`, positive everywhere.
    Gaussian,
    /// `0.75 (1 - (d/h)^2)` for `d <= h`, zero beyond.
    Epanechnikov,
}

/// A smoothing kernel: family, bandwidth, and neighborhood truncation radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    bandwidth: f64,
    truncation: f64,
}

impl KernelSpec {
    /// Validates bandwidth and truncation (both strictly positive).
    pub fn new(family: KernelFamily, bandwidth: f64, truncation: f64) -> Result<Self> {
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(CoreError::InvalidParameter { name: "bandwidth" });
        }
        if !truncation.is_finite() || truncation <= 0.0 {
            return Err(CoreError::InvalidParameter { name: "truncation" });
        }
        Ok(KernelSpec {
            family,
            bandwidth,
            truncation,
        })
    }

    /// Kernel family.
    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// Bandwidth `h`.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Truncation radius: only sites strictly within this Euclidean distance
    /// enter a neighborhood average.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }
}

impl Default for KernelSpec {
    /// Gaussian kernel, bandwidth 3, truncation radius 10.
    fn default() -> Self {
        KernelSpec {
            family: KernelFamily::Gaussian,
            bandwidth: 3.0,
            truncation: 10.0,
        }
    }
}

/// Unnormalized kernel weight at a given distance (normalization cancels in
/// the smoothing ratio).
pub fn kernel_weight(spec: &KernelSpec, distance: f64) -> f64 {
    match spec.family {
        KernelFamily::Gaussian => {
            let u = distance / spec.bandwidth;
            fmath::exp(-0.5 * u * u)
        }
        KernelFamily::Epanechnikov => {
            let u = distance / spec.bandwidth;
            if u <= 1.0 {
                0.75 * (1.0 - u * u)
            } else {
                0.0
            }
        }
    }
}

/// Nonnegative z-score of a two-sided p-value: the quantile at which a
/// standard normal leaves two-sided tail mass `p`. P-values below
/// [`P_FLOOR`] are floored first.
pub fn pvalue_to_z(p: f64) -> Result<f64> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(CoreError::NotProbability { value: p });
    }
    // evaluated on the lower tail, where small p keeps full precision
    Ok(-normal::normal_quantile(p.max(P_FLOOR) / 2.0)?)
}

/// Local false discovery rate estimate, with the ingredients it was built
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct LfdrEstimate {
    /// Per-site estimate `min{ 1, pi0 * f0(z) / fhat(z) }` in site order.
    pub values: Vec<f64>,
    /// Estimated null fraction `min{ 1, #{p > 1/2} / (m/2) }`.
    pub pi0_hat: f64,
    /// Per-site nonnegative z-scores.
    pub z: Vec<f64>,
}

/// Estimates the local false discovery rate at every site.
///
/// Degenerate inputs (all z-scores effectively identical, so the plug-in
/// bandwidth vanishes) fall back to the constant estimate `min{1, pi0}`.
pub fn estimate_lfdr(p: &PValueField) -> LfdrEstimate {
    let m = p.len();
    let z: Vec<f64> = p
        .values()
        .iter()
        .map(|&v| pvalue_to_z(v).expect("p-value fields are pre-validated"))
        .collect();
    let above_half = p.values().iter().filter(|&&v| v > 0.5).count();
    let pi0_hat = (above_half as f64 / (0.5 * m as f64)).min(1.0);

    // symmetrized score sample: the null component is exactly standard normal
    let mut sym: Vec<f64> = Vec::with_capacity(2 * m);
    for &v in &z {
        sym.push(v);
        sym.push(-v);
    }
    sym.sort_by(|a, b| a.partial_cmp(b).expect("z-scores are finite"));
    let nn = sym.len();

    let h = silverman_bandwidth(&sym);
    if !h.is_finite() || h <= 0.0 {
        return LfdrEstimate {
            values: vec![pi0_hat.min(1.0); m],
            pi0_hat,
            z,
        };
    }

    let inv_2h2 = 1.0 / (2.0 * h * h);
    let norm = 1.0 / (nn as f64 * h * fmath::sqrt(2.0 * core::f64::consts::PI));
    let window = KDE_WINDOW * h;
    let values: Vec<f64> = z
        .iter()
        .map(|&zi| {
            let start = sym.partition_point(|&y| y < zi - window);
            let end = sym.partition_point(|&y| y <= zi + window);
            let mut acc = 0.0;
            for &y in &sym[start..end] {
                let d = zi - y;
                acc += fmath::exp(-d * d * inv_2h2);
            }
            let fhat = acc * norm;
            (pi0_hat * normal::normal_pdf(zi) / fhat).min(1.0)
        })
        .collect();

    LfdrEstimate {
        values,
        pi0_hat,
        z,
    }
}

/// Plug-in bandwidth `0.9 * min(sd, IQR / 1.34) * n^(-1/5)` on a sorted
/// sample, with linearly interpolated quartiles.
fn silverman_bandwidth(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n < 2 {
        return 0.0;
    }
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let var = sorted.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    let sd = fmath::sqrt(var);
    let quartile = |frac: f64| -> f64 {
        let pos = frac * (n - 1) as f64;
        let lo = pos as usize;
        let w = pos - lo as f64;
        if lo + 1 < n {
            sorted[lo] * (1.0 - w) + sorted[lo + 1] * w
        } else {
            sorted[lo]
        }
    };
    let iqr = quartile(0.75) - quartile(0.25);
    0.9 * sd.min(iqr / 1.34) * fmath::powf(n as f64, -0.2)
}

/// Smooths the complement of a local false discovery rate estimate over the
/// lattice: at each site, the kernel-weighted average of `1 - Lfdr` over all
/// sites strictly within the truncation radius (the site itself included,
/// neighborhoods truncated at the boundary), clamped into
/// `[clip, 1 - clip]`.
pub fn smooth_sparsity(
    lattice: &Lattice,
    lfdr: &LfdrEstimate,
    kernel: &KernelSpec,
    clip: f64,
) -> Result<SparsityField> {
    let m = lattice.num_sites();
    if lfdr.values.len() != m {
        return Err(CoreError::LengthMismatch {
            expected: m,
            found: lfdr.values.len(),
        });
    }
    let residual: Vec<f64> = lfdr.values.iter().map(|&v| 1.0 - v).collect();
    let mut num = vec![0.0f64; m];
    let mut den = vec![0.0f64; m];

    // padded 3D view: unused trailing axes have extent 1 and offset 0
    let ext = lattice.extents();
    let n: [i64; 3] = [
        ext[0] as i64,
        ext.get(1).map_or(1, |&e| e as i64),
        ext.get(2).map_or(1, |&e| e as i64),
    ];

    for (delta, dist) in ball_offsets(kernel.truncation(), lattice.dimension()) {
        let w = kernel_weight(kernel, dist);
        if w <= 0.0 {
            continue;
        }
        // destination coordinates whose source (dest + delta) stays in bounds
        let mut lo = [1i64; 3];
        let mut hi = [1i64; 3];
        let mut empty = false;
        for a in 0..3 {
            lo[a] = 1.max(1 - delta[a]);
            hi[a] = n[a].min(n[a] - delta[a]);
            if lo[a] > hi[a] {
                empty = true;
                break;
            }
        }
        if empty {
            continue;
        }
        let lin_delta = (delta[0] * n[1] + delta[1]) * n[2] + delta[2];
        for c1 in lo[0]..=hi[0] {
            let base1 = (c1 - 1) * n[1];
            for c2 in lo[1]..=hi[1] {
                let row = ((base1 + (c2 - 1)) * n[2] + (lo[2] - 1)) as usize;
                let len = (hi[2] - lo[2] + 1) as usize;
                let src = (row as i64 + lin_delta) as usize;
                for i in 0..len {
                    num[row + i] += w * residual[src + i];
                    den[row + i] += w;
                }
            }
        }
    }

    let ratios: Vec<f64> = num.iter().zip(&den).map(|(&a, &b)| a / b).collect();
    SparsityField::clamped(ratios, clip)
}

/// Full estimation pipeline: local false discovery rate from the p-values,
/// neighborhood smoothing into a provisional signal-frequency field, then one
/// refinement pass that re-smooths with a locally updated prior.
///
/// The per-site estimate `min{1, pi0 * f0(z) / fhat(z)}` judges every site
/// against the global null fraction, which flattens the field toward the
/// global mean wherever signals cluster. The refinement replaces the global
/// prior with the provisional local one: wherever the first pass was
/// unclipped, `lfdr * (1 - pi_local) / pi0` equals
/// `min{1, (1 - pi_local) * f0(z) / fhat(z)}`, the same posterior built from
/// the locally smoothed signal frequency. Dense neighborhoods therefore pull
/// their sites' null probabilities down while sparse neighborhoods push them
/// up, sharpening the contrast the smoothed field is meant to capture. The
/// returned [`LfdrEstimate`] is the unrefined first-pass estimate.
pub fn estimate_sparsity(
    p: &PValueField,
    lattice: &Lattice,
    kernel: &KernelSpec,
    clip: f64,
) -> Result<(LfdrEstimate, SparsityField)> {
    if p.len() != lattice.num_sites() {
        return Err(CoreError::LengthMismatch {
            expected: lattice.num_sites(),
            found: p.len(),
        });
    }
    let lfdr = estimate_lfdr(p);
    let first = smooth_sparsity(lattice, &lfdr, kernel, clip)?;
    if lfdr.pi0_hat <= 0.0 {
        // no estimated null mass: the local update has nothing to rescale
        return Ok((lfdr, first));
    }
    let refined_values: Vec<f64> = lfdr
        .values
        .iter()
        .zip(first.values())
        .map(|(&l, &pi_local)| (l * (1.0 - pi_local) / lfdr.pi0_hat).min(1.0))
        .collect();
    let refined = LfdrEstimate {
        values: refined_values,
        pi0_hat: lfdr.pi0_hat,
        z: lfdr.z.clone(),
    };
    let field = smooth_sparsity(lattice, &refined, kernel, clip)?;
    Ok((lfdr, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_CLIP;

    #[test]
    fn kernel_spec_validation() {
        assert!(KernelSpec::new(KernelFamily::Gaussian, 0.0, 10.0).is_err());
        assert!(KernelSpec::new(KernelFamily::Gaussian, 3.0, -1.0).is_err());
        let spec = KernelSpec::default();
        assert_eq!(spec.bandwidth(), 3.0);
        assert_eq!(spec.truncation(), 10.0);
        assert_eq!(spec.family(), KernelFamily::Gaussian);
    }

    #[test]
    fn gaussian_weight_at_zero_is_one() {
        let spec = KernelSpec::default();
        assert_eq!(kernel_weight(&spec, 0.0), 1.0);
    }

    #[test]
    fn z_transform_floors_tiny_pvalues() {
        let a = pvalue_to_z(0.0).unwrap();
        let b = pvalue_to_z(P_FLOOR).unwrap();
        assert_eq!(a, b);
        assert!(a > 7.0 && a < 9.0);
    }

    #[test]
    fn silverman_on_degenerate_sample_is_zero() {
        assert_eq!(silverman_bandwidth(&[1.0, 1.0, 1.0, 1.0]), 0.0);
        assert_eq!(silverman_bandwidth(&[2.0]), 0.0);
    }

    #[test]
    fn smoothing_rejects_misaligned_input() {
        let lat = Lattice::new(&[10]).unwrap();
        let est = LfdrEstimate {
            values: alloc::vec![0.5; 9],
            pi0_hat: 1.0,
            z: alloc::vec![0.0; 9],
        };
        assert!(smooth_sparsity(&lat, &est, &KernelSpec::default(), DEFAULT_CLIP).is_err());
    }
}
