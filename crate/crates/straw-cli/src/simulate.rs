//! `simulate` command: Monte Carlo evaluation of every method over a
//! scenario's default parameter sweep (or a single user-chosen point).

use std::path::PathBuf;

use crate::errors::AppError;
use crate::estimate::kernel_json;
use crate::fileio::{render_summary_table, replications_csv, summary_csv, write_atomic};
use crate::harness::{run_scenario, RunConfig, ScenarioRun};
use crate::replicate::METHODS;
use crate::scenario::{ScenarioKind, SweepAxis};

pub struct SimulateOptions {
    pub scenario: ScenarioKind,
    /// Fixed signal strength; on strength-sweep scenarios this collapses the
    /// sweep to a single point.
    pub mu: Option<f64>,
    /// Fixed in-block signal frequency; on frequency-sweep scenarios this
    /// collapses the sweep to a single point.
    pub pi: Option<f64>,
    pub output_dir: PathBuf,
    pub run: RunConfig,
}

/// The (mu, pi) points a simulate invocation covers, honoring the
/// scenario's sweep axis and any fixed values from the command line.
pub fn sweep_points(opts: &SimulateOptions) -> Vec<(f64, f64)> {
    let kind = opts.scenario;
    match kind.sweep_axis() {
        SweepAxis::Mu => {
            let pi = opts.pi.unwrap_or_else(|| kind.default_pi());
            match opts.mu {
                Some(mu) => vec![(mu, pi)],
                None => kind.default_sweep().into_iter().map(|mu| (mu, pi)).collect(),
            }
        }
        SweepAxis::Pi => {
            let mu = opts.mu.unwrap_or_else(|| kind.default_mu());
            match opts.pi {
                Some(pi) => vec![(mu, pi)],
                None => kind.default_sweep().into_iter().map(|pi| (mu, pi)).collect(),
            }
        }
        SweepAxis::Fixed => vec![(kind.default_mu(), kind.default_pi())],
    }
}

fn replications_file_name(kind: ScenarioKind, mu: f64, pi: f64) -> String {
    match kind.sweep_axis() {
        SweepAxis::Mu => format!("{}_mu{:.2}_replications.csv", kind.name(), mu),
        SweepAxis::Pi => format!("{}_pi{:.2}_replications.csv", kind.name(), pi),
        SweepAxis::Fixed => format!("{}_replications.csv", kind.name()),
    }
}

fn axis_name(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Mu => "mu",
        SweepAxis::Pi => "pi",
        SweepAxis::Fixed => "fixed",
    }
}

pub fn cmd_simulate(opts: &SimulateOptions) -> Result<(), AppError> {
    let kind = opts.scenario;
    let points = sweep_points(opts);
    std::fs::create_dir_all(&opts.output_dir).map_err(|e| {
        AppError::io(
            &format!("creating output directory {}", opts.output_dir.display()),
            e,
        )
    })?;

    let mut runs: Vec<ScenarioRun> = Vec::with_capacity(points.len());
    let mut run_entries: Vec<serde_json::Value> = Vec::with_capacity(points.len());
    for &(mu, pi) in &points {
        let cfg = kind.config(mu, pi);
        let run = run_scenario(&cfg, &opts.run)
            .map_err(|e| AppError::Internal(format!("simulation failed: {e:#}")))?;
        let file = replications_file_name(kind, cfg.mu, cfg.pi_signal);
        write_atomic(&opts.output_dir.join(&file), &replications_csv(&run))?;
        run_entries.push(serde_json::json!({
            "mu": cfg.mu,
            "pi": cfg.pi_signal,
            "param": cfg.sweep_value(),
            "replications_file": file,
        }));
        runs.push(run);
    }

    let summary_path = opts.output_dir.join(format!("{}_summary.csv", kind.name()));
    write_atomic(&summary_path, &summary_csv(&runs))?;

    let mut doc = kernel_json(&opts.run.kernel, opts.run.clip);
    let obj = doc.as_object_mut().expect("kernel_json builds an object");
    obj.insert("command".into(), "simulate".into());
    obj.insert("scenario".into(), kind.name().into());
    obj.insert("sweep_axis".into(), axis_name(kind.sweep_axis()).into());
    obj.insert(
        "sweep_values".into(),
        serde_json::json!(runs
            .iter()
            .map(|r| r.config.sweep_value())
            .collect::<Vec<f64>>()),
    );
    obj.insert("runs".into(), serde_json::Value::Array(run_entries));
    obj.insert("reps".into(), opts.run.reps.into());
    obj.insert("alpha".into(), opts.run.alpha.into());
    obj.insert("seed".into(), opts.run.base_seed.into());
    obj.insert("threads".into(), opts.run.threads.into());
    obj.insert(
        "grid".into(),
        serde_json::json!({
            "b1": opts.run.grid.b1(),
            "b2": opts.run.grid.b2(),
            "segments": opts.run.grid.segments(),
        }),
    );
    obj.insert("methods".into(), serde_json::json!(METHODS));
    let json_path = opts.output_dir.join(format!("{}_summary.json", kind.name()));
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("JSON serialization cannot fail");
    bytes.push(b'\n');
    write_atomic(&json_path, &bytes)?;

    print!("{}", render_summary_table(&runs));
    println!(
        "wrote {} replication file(s), {}, {}",
        runs.len(),
        summary_path.display(),
        json_path.display()
    );
    Ok(())
}
