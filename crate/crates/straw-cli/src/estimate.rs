//! `estimate-pi` command: local alternative-fraction estimation for a
//! lattice of p-values, without running any testing procedure.

use std::path::{Path, PathBuf};

use straw_core::field::PValueField;
use straw_core::sparsity::{estimate_sparsity, KernelFamily, KernelSpec};

use crate::errors::AppError;
use crate::fileio::{fmt_float, read_lattice_csv, validate_probabilities, write_atomic};

pub struct EstimateOptions {
    pub input: PathBuf,
    pub output: PathBuf,
    pub kernel: KernelSpec,
    pub clip: f64,
}

fn kernel_name(family: KernelFamily) -> &'static str {
    match family {
        KernelFamily::Gaussian => "gaussian",
        KernelFamily::Epanechnikov => "epanechnikov",
    }
}

/// Shared JSON description of the estimation configuration.
pub fn kernel_json(kernel: &KernelSpec, clip: f64) -> serde_json::Value {
    serde_json::json!({
        "kernel": kernel_name(kernel.family()),
        "bandwidth": kernel.bandwidth(),
        "truncation": kernel.truncation(),
        "clip": clip,
    })
}

pub fn cmd_estimate_pi(opts: &EstimateOptions) -> Result<(), AppError> {
    let table = read_lattice_csv(&opts.input, "p")?;
    validate_probabilities(&table, &opts.input)?;
    let pvalues = PValueField::new(table.values.clone())
        .map_err(|e| AppError::Usage(format!("{}: {e}", opts.input.display())))?;

    let (lfdr, pi1) = estimate_sparsity(&pvalues, &table.lattice, &opts.kernel, opts.clip)
        .map_err(|e| AppError::Internal(format!("sparsity estimation failed: {e}")))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let dim = table.lattice.dimension();
    let mut header: Vec<String> = (1..=dim).map(|d| format!("coord{d}")).collect();
    header.push("lfdr_hat".to_string());
    header.push("pi1_hat".to_string());
    w.write_record(&header).expect("in-memory CSV writes cannot fail");
    for i in 0..table.lattice.num_sites() {
        let site = table.lattice.site_at(i).expect("index in range");
        let mut row: Vec<String> = site.coords().iter().map(|c| c.to_string()).collect();
        row.push(fmt_float(lfdr.values[i]));
        row.push(fmt_float(pi1.values()[i]));
        w.write_record(&row).expect("in-memory CSV writes cannot fail");
    }
    let bytes = w.into_inner().expect("in-memory CSV writer cannot fail");
    write_atomic(&opts.output, &bytes)?;

    let mut sidecar = kernel_json(&opts.kernel, opts.clip);
    let obj = sidecar.as_object_mut().expect("kernel_json builds an object");
    obj.insert("command".into(), "estimate-pi".into());
    obj.insert("input".into(), opts.input.display().to_string().into());
    obj.insert("pi0_hat".into(), lfdr.pi0_hat.into());
    obj.insert("num_sites".into(), table.lattice.num_sites().into());
    obj.insert(
        "extents".into(),
        serde_json::json!(table.lattice.extents()),
    );
    write_sidecar(&opts.output, &sidecar)?;
    println!(
        "estimated alternative fractions for {} sites (pi0_hat {:.4}) -> {}",
        table.lattice.num_sites(),
        lfdr.pi0_hat,
        opts.output.display()
    );
    Ok(())
}

/// Writes `value` as pretty JSON next to `output`, swapping the extension
/// for `.json`.
pub fn write_sidecar(output: &Path, value: &serde_json::Value) -> Result<(), AppError> {
    let path = output.with_extension("json");
    let mut bytes = serde_json::to_vec_pretty(value).expect("JSON serialization cannot fail");
    bytes.push(b'\n');
    write_atomic(&path, &bytes)
}
