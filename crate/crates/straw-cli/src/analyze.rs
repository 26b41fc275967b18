//! `analyze` command: run one multiple-testing procedure on a lattice of
//! p-values and write per-site decisions plus a machine-readable config
//! record.

use std::path::PathBuf;

use straw_core::field::{PValueField, SparsityField};
use straw_core::procedures::{
    bh_procedure, laws_procedure, lfdr_stepup, procedure1_bh, select_k, GridSpec, StepUpOutcome,
};
use straw_core::sparsity::{estimate_lfdr, estimate_sparsity, KernelSpec};
use straw_core::weighting::{rescaled_pvalues, weighted_pvalues};

use crate::errors::AppError;
use crate::estimate::{kernel_json, write_sidecar};
use crate::fileio::{fmt_float, read_lattice_csv, validate_probabilities, write_atomic};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MethodName {
    Bh,
    Lfdr,
    LawsOracle,
    LawsDd,
    StrawOracle,
    StrawDd,
    Procedure1,
}

impl MethodName {
    pub fn parse(s: &str) -> Result<Self, AppError> {
        match s.to_ascii_lowercase().as_str() {
            "bh" => Ok(Self::Bh),
            "lfdr" => Ok(Self::Lfdr),
            "laws-oracle" => Ok(Self::LawsOracle),
            "laws-dd" => Ok(Self::LawsDd),
            "straw-oracle" => Ok(Self::StrawOracle),
            "straw-dd" => Ok(Self::StrawDd),
            "procedure1" => Ok(Self::Procedure1),
            other => Err(AppError::Usage(format!(
                "unknown method {other:?}; expected one of bh, lfdr, laws-oracle, laws-dd, \
                 straw-oracle, straw-dd, procedure1"
            ))),
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Self::Bh => "bh",
            Self::Lfdr => "lfdr",
            Self::LawsOracle => "laws-oracle",
            Self::LawsDd => "laws-dd",
            Self::StrawOracle => "straw-oracle",
            Self::StrawDd => "straw-dd",
            Self::Procedure1 => "procedure1",
        }
    }

    /// Methods that take the true alternative fractions from a file.
    pub fn requires_pi1(self) -> bool {
        matches!(self, Self::LawsOracle | Self::StrawOracle | Self::Procedure1)
    }

    /// Methods that estimate structure from the p-values themselves.
    pub fn estimates(self) -> bool {
        matches!(self, Self::Lfdr | Self::LawsDd | Self::StrawDd)
    }

    fn uses_grid(self) -> bool {
        matches!(self, Self::StrawOracle | Self::StrawDd)
    }
}

pub struct AnalyzeOptions {
    pub input: PathBuf,
    pub output: PathBuf,
    pub method: MethodName,
    pub alpha: f64,
    pub grid: GridSpec,
    pub kernel: KernelSpec,
    pub clip: f64,
    /// Weight-shape exponent for `procedure1`.
    pub shape_k: f64,
    pub pi1: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, AppError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(AppError::Usage(format!(
                "unknown format {other:?}; expected csv or json"
            ))),
        }
    }
}

struct Analysis {
    /// The per-site decision statistic the step-up rule ranked: raw,
    /// weighted, rescaled, or local-fdr values depending on the method.
    statistic: Vec<f64>,
    /// Alternative fraction each site's weight was built from, when the
    /// method uses one.
    pi_used: Option<Vec<f64>>,
    outcome: StepUpOutcome,
}

fn internal(e: impl std::fmt::Display) -> AppError {
    AppError::Internal(format!("procedure failed on validated input: {e}"))
}

pub fn cmd_analyze(opts: &AnalyzeOptions) -> Result<(), AppError> {
    if opts.method.requires_pi1() && opts.pi1.is_none() {
        return Err(AppError::Usage(format!(
            "method {} requires --pi1 FILE with oracle alternative fractions",
            opts.method.token()
        )));
    }
    if !opts.method.requires_pi1() && opts.pi1.is_some() {
        return Err(AppError::Usage(format!(
            "--pi1 is only accepted by oracle methods, not {}",
            opts.method.token()
        )));
    }

    let table = read_lattice_csv(&opts.input, "p")?;
    validate_probabilities(&table, &opts.input)?;
    let pvalues = PValueField::new(table.values.clone())
        .map_err(|e| AppError::Usage(format!("{}: {e}", opts.input.display())))?;
    let lattice = &table.lattice;

    let oracle_pi = match &opts.pi1 {
        Some(path) => {
            let pi_table = read_lattice_csv(path, "pi1")?;
            if pi_table.lattice.extents() != lattice.extents() {
                return Err(AppError::Usage(format!(
                    "{}: extents {:?} do not match the p-value lattice {:?}",
                    path.display(),
                    pi_table.lattice.extents(),
                    lattice.extents()
                )));
            }
            Some(
                SparsityField::clamped(pi_table.values, opts.clip)
                    .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };

    let sparsity_for = |pi: &SparsityField,
                        weight_shape: Option<f64>|
     -> Result<Analysis, AppError> {
        match opts.method {
            MethodName::LawsOracle | MethodName::LawsDd => {
                let outcome = laws_procedure(&pvalues, pi, opts.alpha).map_err(internal)?;
                let weighted = weighted_pvalues(&pvalues, pi, 1.0).map_err(internal)?;
                Ok(Analysis {
                    statistic: weighted.values().to_vec(),
                    pi_used: Some(pi.values().to_vec()),
                    outcome,
                })
            }
            MethodName::StrawOracle | MethodName::StrawDd => {
                let (k, outcome) =
                    select_k(&pvalues, pi, &opts.grid, opts.alpha).map_err(internal)?;
                let weighted = weighted_pvalues(&pvalues, pi, k).map_err(internal)?;
                Ok(Analysis {
                    statistic: weighted.values().to_vec(),
                    pi_used: Some(pi.values().to_vec()),
                    outcome,
                })
            }
            MethodName::Procedure1 => {
                let k = weight_shape.expect("procedure1 always passes its exponent");
                let outcome = procedure1_bh(&pvalues, pi, k, opts.alpha).map_err(internal)?;
                let rescaled = rescaled_pvalues(&pvalues, pi, k).map_err(internal)?;
                Ok(Analysis {
                    statistic: rescaled.sitewise,
                    pi_used: Some(pi.values().to_vec()),
                    outcome,
                })
            }
            _ => Err(AppError::Internal("method dispatch mismatch".into())),
        }
    };

    let analysis = match opts.method {
        MethodName::Bh => {
            let outcome = bh_procedure(pvalues.values(), opts.alpha).map_err(internal)?;
            Analysis {
                statistic: pvalues.values().to_vec(),
                pi_used: None,
                outcome,
            }
        }
        MethodName::Lfdr => {
            let estimate = estimate_lfdr(&pvalues);
            let outcome = lfdr_stepup(&estimate.values, opts.alpha);
            Analysis {
                statistic: estimate.values,
                pi_used: None,
                outcome,
            }
        }
        MethodName::LawsOracle | MethodName::StrawOracle => {
            sparsity_for(oracle_pi.as_ref().expect("checked above"), None)?
        }
        MethodName::Procedure1 => {
            sparsity_for(oracle_pi.as_ref().expect("checked above"), Some(opts.shape_k))?
        }
        MethodName::LawsDd | MethodName::StrawDd => {
            let (_, pi) = estimate_sparsity(&pvalues, lattice, &opts.kernel, opts.clip)
                .map_err(internal)?;
            sparsity_for(&pi, None)?
        }
    };

    let mut config = serde_json::json!({
        "command": "analyze",
        "method": opts.method.token(),
        "alpha": opts.alpha,
        "input": opts.input.display().to_string(),
        "num_sites": lattice.num_sites(),
        "extents": lattice.extents(),
        "rejection_count": analysis.outcome.rejection_count,
        "threshold": analysis.outcome.threshold,
        "k_selected": analysis.outcome.k_used,
    });
    let obj = config.as_object_mut().expect("json! object");
    if opts.method.estimates() {
        for (key, value) in kernel_json(&opts.kernel, opts.clip)
            .as_object()
            .expect("kernel_json builds an object")
        {
            obj.insert(key.clone(), value.clone());
        }
    }
    if opts.method.requires_pi1() {
        obj.insert(
            "pi1".into(),
            opts.pi1
                .as_ref()
                .expect("checked above")
                .display()
                .to_string()
                .into(),
        );
        obj.insert("clip".into(), opts.clip.into());
    }
    if opts.method.uses_grid() {
        obj.insert(
            "grid".into(),
            serde_json::json!({
                "b1": opts.grid.b1(),
                "b2": opts.grid.b2(),
                "segments": opts.grid.segments(),
            }),
        );
    }
    if opts.method == MethodName::Procedure1 {
        obj.insert("shape_k".into(), opts.shape_k.into());
    }

    match opts.format {
        OutputFormat::Csv => {
            let bytes = decisions_csv(&table.lattice, &pvalues, &analysis);
            write_atomic(&opts.output, &bytes)?;
            write_sidecar(&opts.output, &config)?;
        }
        OutputFormat::Json => {
            let decisions: Vec<serde_json::Value> = (0..lattice.num_sites())
                .map(|i| {
                    let site = lattice.site_at(i).expect("index in range");
                    serde_json::json!({
                        "coords": site.coords(),
                        "p": pvalues.values()[i],
                        "p_weighted": analysis.statistic[i],
                        "pi1_used": analysis.pi_used.as_ref().map(|v| v[i]),
                        "reject": analysis.outcome.decisions[i],
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "config": config,
                "decisions": decisions,
            });
            let mut bytes =
                serde_json::to_vec_pretty(&doc).expect("JSON serialization cannot fail");
            bytes.push(b'\n');
            write_atomic(&opts.output, &bytes)?;
        }
    }

    println!(
        "method {} rejected {} of {} sites at alpha {} -> {}",
        opts.method.token(),
        analysis.outcome.rejection_count,
        lattice.num_sites(),
        opts.alpha,
        opts.output.display()
    );
    Ok(())
}

fn decisions_csv(
    lattice: &straw_core::lattice::Lattice,
    pvalues: &PValueField,
    analysis: &Analysis,
) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let dim = lattice.dimension();
    let mut header: Vec<String> = (1..=dim).map(|d| format!("coord{d}")).collect();
    header.extend(["p", "p_weighted", "pi1_used", "reject"].map(String::from));
    w.write_record(&header).expect("in-memory CSV writes cannot fail");
    for i in 0..lattice.num_sites() {
        let site = lattice.site_at(i).expect("index in range");
        let mut row: Vec<String> = site.coords().iter().map(|c| c.to_string()).collect();
        row.push(fmt_float(pvalues.values()[i]));
        row.push(fmt_float(analysis.statistic[i]));
        row.push(match &analysis.pi_used {
            Some(v) => fmt_float(v[i]),
            None => String::new(),
        });
        row.push(if analysis.outcome.decisions[i] { "1" } else { "0" }.to_string());
        w.write_record(&row).expect("in-memory CSV writes cannot fail");
    }
    w.into_inner().expect("in-memory CSV writer cannot fail")
}
