//! Single-replication simulation and method execution.
//!
//! One replication draws a signal indicator and a test statistic per site
//! (one uniform then one standard normal draw, in site order, from a
//! counter-seeded generator), converts statistics to two-sided p-values, and
//! runs every configured method on the same draw — a paired comparison.

use anyhow::Context;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use straw_core::field::{PValueField, SparsityField};
use straw_core::normal::two_sided_p;
use straw_core::procedures::{bh_procedure, laws_procedure, select_k, StepUpOutcome};
use straw_core::sparsity::estimate_sparsity;

use crate::harness::RunConfig;
use crate::scenario::ScenarioConfig;

/// Method names in execution and output order.
pub const METHODS: [&str; 5] = ["BH", "LAWS.or", "LAWS.dd", "STRAW.or", "STRAW.dd"];

/// One simulated data draw.
pub struct SimulatedData {
    /// True signal indicators.
    pub theta: Vec<bool>,
    /// Two-sided p-values.
    pub pvalues: PValueField,
}

/// Draws signal indicators and p-values for one replication.
///
/// Per site, in order: one uniform variate decides the signal indicator,
/// one standard normal variate forms the statistic (shifted by `mu` at
/// signal sites). The fixed draw order couples replications across
/// parameter values sharing a seed: raising the signal frequency only adds
/// signal sites, never reshuffles existing draws.
pub fn simulate_replication(cfg: &ScenarioConfig, seed: u64) -> SimulatedData {
    let m = cfg.lattice.num_sites();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    for s in 0..m {
        let u: f64 = rng.random();
        let z: f64 = rng.sample(StandardNormal);
        let is_signal = u < cfg.signal_prob[s];
        let x = if is_signal { z + cfg.mu } else { z };
        theta.push(is_signal);
        p.push(two_sided_p(x));
    }
    SimulatedData {
        theta,
        pvalues: PValueField::new(p).expect("two-sided p-values are in [0, 1]"),
    }
}

/// False discovery proportion: false rejections over rejections (0 when
/// nothing is rejected).
pub fn compute_fdp(theta: &[bool], decisions: &[bool]) -> f64 {
    let mut fp = 0usize;
    let mut r = 0usize;
    for (&t, &d) in theta.iter().zip(decisions) {
        if d {
            r += 1;
            if !t {
                fp += 1;
            }
        }
    }
    fp as f64 / r.max(1) as f64
}

/// Number of true rejections.
pub fn compute_tp(theta: &[bool], decisions: &[bool]) -> usize {
    theta
        .iter()
        .zip(decisions)
        .filter(|&(&t, &d)| t && d)
        .count()
}

/// One method's performance on one replication.
#[derive(Debug, Clone)]
pub struct MethodRecord {
    pub method: &'static str,
    pub fdp: f64,
    pub tp: usize,
    pub false_positives: usize,
    pub rejections: usize,
    pub k_selected: Option<f64>,
    pub threshold: f64,
}

/// All methods' performance on one replication.
#[derive(Debug, Clone)]
pub struct ReplicationRecord {
    pub rep: usize,
    pub seed: u64,
    /// Number of true signals in this draw.
    pub signals: usize,
    /// One record per entry of [`METHODS`], in order.
    pub methods: Vec<MethodRecord>,
}

fn record(method: &'static str, theta: &[bool], out: &StepUpOutcome) -> MethodRecord {
    let tp = compute_tp(theta, &out.decisions);
    MethodRecord {
        method,
        fdp: compute_fdp(theta, &out.decisions),
        tp,
        false_positives: out.rejection_count - tp,
        rejections: out.rejection_count,
        k_selected: out.k_used,
        threshold: out.threshold,
    }
}

/// Runs every method on one fresh draw. The oracle methods receive the true
/// layout (clamped); the data-driven methods estimate the sparsity from the
/// p-values alone. Any method failure aborts the replication with a
/// diagnostic naming the scenario, replication, and method.
pub fn run_replication(
    cfg: &ScenarioConfig,
    rc: &RunConfig,
    rep: usize,
) -> anyhow::Result<ReplicationRecord> {
    let seed = rc.base_seed.wrapping_add(rep as u64);
    let data = simulate_replication(cfg, seed);
    let diag = |method: &str| {
        format!(
            "scenario {} rep {rep} method {method} failed",
            cfg.kind.name()
        )
    };

    let oracle_pi = SparsityField::clamped(cfg.signal_prob.clone(), rc.clip)
        .with_context(|| diag("oracle layout"))?;

    let bh = bh_procedure(data.pvalues.values(), rc.alpha).with_context(|| diag("BH"))?;
    let laws_or =
        laws_procedure(&data.pvalues, &oracle_pi, rc.alpha).with_context(|| diag("LAWS.or"))?;
    let (_, straw_or) =
        select_k(&data.pvalues, &oracle_pi, &rc.grid, rc.alpha).with_context(|| diag("STRAW.or"))?;

    // one sparsity estimate per replication, shared by both data-driven methods
    let (_, pi_hat) = estimate_sparsity(&data.pvalues, &cfg.lattice, &rc.kernel, rc.clip)
        .with_context(|| diag("sparsity estimation"))?;
    let laws_dd =
        laws_procedure(&data.pvalues, &pi_hat, rc.alpha).with_context(|| diag("LAWS.dd"))?;
    let (_, straw_dd) =
        select_k(&data.pvalues, &pi_hat, &rc.grid, rc.alpha).with_context(|| diag("STRAW.dd"))?;

    let methods = vec![
        record("BH", &data.theta, &bh),
        record("LAWS.or", &data.theta, &laws_or),
        record("LAWS.dd", &data.theta, &laws_dd),
        record("STRAW.or", &data.theta, &straw_or),
        record("STRAW.dd", &data.theta, &straw_dd),
    ];
    Ok(ReplicationRecord {
        rep,
        seed,
        signals: data.theta.iter().filter(|&&t| t).count(),
        methods,
    })
}
