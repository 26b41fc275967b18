//! Monte Carlo harness: many replications, serial or on a thread pool, with
//! identical results either way.

use anyhow::Context;
use rayon::prelude::*;

use straw_core::field::DEFAULT_CLIP;
use straw_core::procedures::GridSpec;
use straw_core::sparsity::KernelSpec;

use crate::replicate::{run_replication, ReplicationRecord, METHODS};
use crate::scenario::ScenarioConfig;

/// Everything a scenario run needs besides the scenario itself.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub reps: usize,
    pub alpha: f64,
    pub base_seed: u64,
    pub grid: GridSpec,
    pub kernel: KernelSpec,
    pub clip: f64,
    /// 1 = serial; larger values run replications on a thread pool of this
    /// size. Results are identical either way (per-replication seeding,
    /// order-preserving collection).
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            reps: 100,
            alpha: 0.1,
            base_seed: 7,
            grid: GridSpec::default(),
            kernel: KernelSpec::default(),
            clip: DEFAULT_CLIP,
            threads: 1,
        }
    }
}

/// Per-method aggregate over a run.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub method: &'static str,
    /// Mean false discovery proportion.
    pub fdr: f64,
    pub fdr_se: f64,
    /// Mean number of true positives.
    pub atp: f64,
    pub atp_se: f64,
}

/// A completed scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub run: RunConfig,
    pub replications: Vec<ReplicationRecord>,
    /// One summary per entry of [`METHODS`], in order.
    pub summaries: Vec<MethodSummary>,
}

/// Sample mean and Monte Carlo standard error (sample SD over sqrt(n); 0
/// when fewer than two values).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs `rc.reps` replications of the scenario (seeds `base_seed + r`) and
/// aggregates per-method summaries. With `threads > 1` the replications run
/// on a dedicated thread pool; collection preserves replication order, so
/// the output is bitwise-identical to a serial run.
pub fn run_scenario(cfg: &ScenarioConfig, rc: &RunConfig) -> anyhow::Result<ScenarioRun> {
    let replications: Vec<ReplicationRecord> = if rc.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(rc.threads)
            .build()
            .context("building replication thread pool")?;
        pool.install(|| {
            (0..rc.reps)
                .into_par_iter()
                .map(|r| run_replication(cfg, rc, r))
                .collect::<anyhow::Result<Vec<_>>>()
        })?
    } else {
        (0..rc.reps)
            .map(|r| run_replication(cfg, rc, r))
            .collect::<anyhow::Result<Vec<_>>>()?
    };

    let summaries = METHODS
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let fdps: Vec<f64> = replications.iter().map(|r| r.methods[mi].fdp).collect();
            let tps: Vec<f64> = replications
                .iter()
                .map(|r| r.methods[mi].tp as f64)
                .collect();
            let (fdr, fdr_se) = mean_and_se(&fdps);
            let (atp, atp_se) = mean_and_se(&tps);
            MethodSummary {
                method,
                fdr,
                fdr_se,
                atp,
                atp_se,
            }
        })
        .collect();

    Ok(ScenarioRun {
        config: cfg.clone(),
        run: rc.clone(),
        replications,
        summaries,
    })
}
