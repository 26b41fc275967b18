//! Step-up multiple-testing procedures.
//!
//! Every procedure here comes in a ranking form (sort the statistics, find
//! the largest feasible rank, reject that many) and, where a threshold sweep
//! exists, an equivalent sweep form (maximize a data-driven threshold whose
//! estimated false discovery proportion stays within the target level). The
//! two forms are required to agree exactly — same rejection sets, same
//! realized thresholds — and the integration tests enforce that on random
//! and adversarial inputs.
//!
//! Ties are handled by stable ranking: statistics sort by value with the
//! site index breaking ties, and a procedure whose criterion lands strictly
//! inside a tie block (possible for the local-false-discovery-rate step-up)
//! rejects the first `l` sites in that stable order.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::field::{PValueField, SparsityField};
use crate::lattice::Lattice;
use crate::sparsity::{estimate_sparsity, KernelSpec};
use crate::weighting::{weighted_pvalues, WeightedPValueSet};

/// Result of a step-up procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct StepUpOutcome {
    /// Number of rejected hypotheses.
    pub rejection_count: usize,
    /// Realized rejection threshold on the procedure's own statistic scale
    /// (the largest rejected statistic; 0 when nothing is rejected).
    pub threshold: f64,
    /// Per-site decisions in site order (`true` = rejected).
    pub decisions: Vec<bool>,
    /// Shape parameter behind the statistics, when one exists.
    pub k_used: Option<f64>,
}

impl StepUpOutcome {
    fn none(m: usize) -> Self {
        StepUpOutcome {
            rejection_count: 0,
            threshold: 0.0,
            decisions: vec![false; m],
            k_used: None,
        }
    }
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
        return Err(CoreError::InvalidParameter { name: "alpha" });
    }
    Ok(())
}

/// Stable ascending order of `stats` (ties broken by site index).
fn stable_order(stats: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..stats.len()).collect();
    order.sort_by(|&a, &b| {
        stats[a]
            .partial_cmp(&stats[b])
            .expect("statistics must not be NaN")
            .then(a.cmp(&b))
    });
    order
}

/// Core ranking engine: visits sorted statistics in ascending order, keeps
/// the largest rank `j` for which `feasible(j, value)` holds, and rejects the
/// first `l` statistics in stable order.
///
/// With `skip_clipped`, statistics that reached the clip value 1 are not
/// candidate ranks: the underlying threshold sweep runs over thresholds
/// strictly below 1, and a clipped statistic carries no evidence (its raw
/// p-value was too large for its weight), so it must never be rejected.
fn stepup_by_rank<F>(stats: &[f64], skip_clipped: bool, mut feasible: F) -> StepUpOutcome
where
    F: FnMut(usize, f64) -> bool,
{
    let m = stats.len();
    if m == 0 {
        return StepUpOutcome::none(0);
    }
    let order = stable_order(stats);
    let mut l = 0usize;
    for (j0, &site) in order.iter().enumerate() {
        let value = stats[site];
        if skip_clipped && value >= 1.0 {
            break; // sorted: everything after is clipped too
        }
        if feasible(j0 + 1, value) {
            l = j0 + 1;
        }
    }
    let mut decisions = vec![false; m];
    for &site in &order[..l] {
        decisions[site] = true;
    }
    let threshold = if l == 0 { 0.0 } else { stats[order[l - 1]] };
    StepUpOutcome {
        rejection_count: l,
        threshold,
        decisions,
        k_used: None,
    }
}

/// Threshold-sweep engine: evaluates the estimated false discovery
/// proportion `scale * t / #{stats <= t}` at every distinct statistic value
/// `t` (optionally excluding clipped values at 1), takes the largest feasible
/// threshold, and rejects everything at or below it.
fn threshold_sweep(stats: &[f64], scale: f64, alpha: f64, exclude_ones: bool) -> StepUpOutcome {
    let m = stats.len();
    if m == 0 {
        return StepUpOutcome::none(0);
    }
    let mut sorted = stats.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("statistics must not be NaN"));
    let mut best: Option<(f64, usize)> = None;
    let mut idx = 0usize;
    while idx < m {
        let t = sorted[idx];
        let mut end = idx;
        while end + 1 < m && sorted[end + 1] == t {
            end += 1;
        }
        let count = end + 1; // #{stats <= t}
        if !(exclude_ones && t >= 1.0) && scale * t / (count as f64) <= alpha {
            best = Some((t, count));
        }
        idx = end + 1;
    }
    match best {
        None => StepUpOutcome::none(m),
        Some((t, count)) => {
            let decisions: Vec<bool> = stats.iter().map(|&v| v <= t).collect();
            StepUpOutcome {
                rejection_count: count,
                threshold: t,
                decisions,
                k_used: None,
            }
        }
    }
}

/// Classical step-up procedure on raw p-values: rejects the `l` smallest
/// where `l` is the largest rank `j` with `p_(j) <= alpha * j / m`.
pub fn bh_procedure(pvalues: &[f64], alpha: f64) -> Result<StepUpOutcome> {
    validate_alpha(alpha)?;
    if pvalues.is_empty() {
        return Err(CoreError::Empty);
    }
    for &v in pvalues {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(CoreError::NotProbability { value: v });
        }
    }
    // written exactly like the sweep-form criterion so the two forms agree
    // bit for bit at knife-edge inputs
    let m = pvalues.len() as f64;
    Ok(stepup_by_rank(pvalues, false, |j, v| {
        m * v / (j as f64) <= alpha
    }))
}

/// Step-up on local false discovery rate statistics: rejects the `l`
/// smallest where `l` is the largest rank whose running mean stays within
/// `alpha`.
///
/// Inputs must be finite and NaN-free; values in `[0, 1]` are expected.
pub fn lfdr_stepup(lfdr: &[f64], alpha: f64) -> StepUpOutcome {
    let mut running = 0.0f64;
    stepup_by_rank(lfdr, false, |j, v| {
        running += v;
        running / j as f64 <= alpha
    })
}

/// Step-up on weighted p-values: rejects the `l` smallest where `l` is the
/// largest rank `j` with `C * w_(j) / j <= alpha`, `C` being the coefficient
/// sum. Clipped values (exactly 1) are never candidates.
pub fn straw_stepup(weighted: &WeightedPValueSet, alpha: f64) -> StepUpOutcome {
    let c = weighted.coefficient_sum();
    let mut out = stepup_by_rank(weighted.values(), true, |j, v| {
        c * v / (j as f64) <= alpha
    });
    out.k_used = Some(weighted.k());
    out
}

/// Threshold-sweep form of [`straw_stepup`]: maximizes `t` over the distinct
/// weighted p-values strictly below 1 subject to
/// `C * t / #{w <= t} <= alpha`, then rejects everything at or below `t`.
///
/// Provably identical to the ranking form on every input.
pub fn threshold_form_stepup(weighted: &WeightedPValueSet, alpha: f64) -> StepUpOutcome {
    let c = weighted.coefficient_sum();
    let mut out = threshold_sweep(weighted.values(), c, alpha, true);
    out.k_used = Some(weighted.k());
    out
}

/// Step-up on sitewise-rescaled p-values at level `alpha`: the statistics
/// are `min{ p_s / w*_s, 1 }` with the factors `w*` averaging to 1, and the
/// rank criterion is the classical `p*_(j) <= alpha * j / m`.
pub fn procedure1_bh(
    p: &PValueField,
    pi1: &SparsityField,
    k: f64,
    alpha: f64,
) -> Result<StepUpOutcome> {
    validate_alpha(alpha)?;
    let r = crate::weighting::rescaled_pvalues(p, pi1, k)?;
    let m = p.len() as f64;
    let mut out = stepup_by_rank(&r.sitewise, false, |j, v| m * v / (j as f64) <= alpha);
    out.k_used = Some(k);
    Ok(out)
}

/// Threshold-sweep form of [`procedure1_bh`]: maximizes `t` over distinct
/// rescaled p-values subject to `m * t / #{p* <= t} <= alpha`.
///
/// The clip value 1 needs no special casing here: its estimated false
/// discovery proportion is `m / m = 1 > alpha`, never feasible.
pub fn procedure1_threshold_form(
    p: &PValueField,
    pi1: &SparsityField,
    k: f64,
    alpha: f64,
) -> Result<StepUpOutcome> {
    validate_alpha(alpha)?;
    let r = crate::weighting::rescaled_pvalues(p, pi1, k)?;
    let mut out = threshold_sweep(&r.sitewise, p.len() as f64, alpha, false);
    out.k_used = Some(k);
    Ok(out)
}

/// An evenly spaced grid of shape parameters `B1..=B2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    b1: f64,
    b2: f64,
    segments: usize,
}

impl GridSpec {
    /// Grid from `b1` to `b2` with `segments + 1` points. `segments == 0`
    /// yields the single point `b1`.
    pub fn new(b1: f64, b2: f64, segments: usize) -> Result<Self> {
        if !b1.is_finite() || b1 <= 0.0 {
            return Err(CoreError::InvalidParameter { name: "b1" });
        }
        if !b2.is_finite() || (segments > 0 && b2 <= b1) || b2 < b1 {
            return Err(CoreError::InvalidParameter { name: "b2" });
        }
        Ok(GridSpec { b1, b2, segments })
    }

    /// Smallest shape parameter.
    pub fn b1(&self) -> f64 {
        self.b1
    }

    /// Largest shape parameter.
    pub fn b2(&self) -> f64 {
        self.b2
    }

    /// Number of segments (one fewer than the number of points).
    pub fn segments(&self) -> usize {
        self.segments
    }

    /// The grid points `b1 + i * (b2 - b1) / segments`, ascending.
    pub fn points(&self) -> Vec<f64> {
        if self.segments == 0 {
            return vec![self.b1];
        }
        let step = (self.b2 - self.b1) / self.segments as f64;
        (0..=self.segments)
            .map(|i| self.b1 + i as f64 * step)
            .collect()
    }
}

impl Default for GridSpec {
    /// The default grid 0.5, 0.75, ..., 5.0 (19 points).
    fn default() -> Self {
        GridSpec {
            b1: 0.5,
            b2: 5.0,
            segments: 18,
        }
    }
}

/// Runs the weighted step-up at every grid point and keeps the shape
/// parameter maximizing the rejection count, breaking ties toward the
/// smallest parameter. Returns the winning parameter and its outcome.
pub fn select_k(
    p: &PValueField,
    pi1: &SparsityField,
    grid: &GridSpec,
    alpha: f64,
) -> Result<(f64, StepUpOutcome)> {
    validate_alpha(alpha)?;
    let mut best: Option<(f64, StepUpOutcome)> = None;
    for k in grid.points() {
        let w = weighted_pvalues(p, pi1, k)?;
        let out = straw_stepup(&w, alpha);
        let better = match &best {
            None => true,
            Some((_, incumbent)) => out.rejection_count > incumbent.rejection_count,
        };
        if better {
            best = Some((k, out));
        }
    }
    Ok(best.expect("grid always has at least one point"))
}

/// Weighted step-up driven by a known local signal-frequency field, with the
/// shape parameter chosen from the grid by rejection count.
pub fn straw_oracle(
    p: &PValueField,
    pi1: &SparsityField,
    grid: &GridSpec,
    alpha: f64,
) -> Result<StepUpOutcome> {
    select_k(p, pi1, grid, alpha).map(|(_, out)| out)
}

/// Weighted step-up driven by an estimated local signal-frequency field:
/// estimates the local false discovery rate from the p-values, smooths its
/// complement over the lattice, then selects the shape parameter from the
/// grid by rejection count.
pub fn straw_data_driven(
    p: &PValueField,
    lattice: &Lattice,
    kernel: &KernelSpec,
    clip: f64,
    grid: &GridSpec,
    alpha: f64,
) -> Result<StepUpOutcome> {
    let (_, pi1) = estimate_sparsity(p, lattice, kernel, clip)?;
    select_k(p, &pi1, grid, alpha).map(|(_, out)| out)
}

/// The weighted step-up with the shape parameter fixed at 1 (weights equal
/// to the local signal odds).
pub fn laws_procedure(
    p: &PValueField,
    pi1: &SparsityField,
    alpha: f64,
) -> Result<StepUpOutcome> {
    validate_alpha(alpha)?;
    let w = weighted_pvalues(p, pi1, 1.0)?;
    Ok(straw_stepup(&w, alpha))
}
