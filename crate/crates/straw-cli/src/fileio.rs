//! File formats: CSV reading with full-lattice validation, CSV/JSON writing
//! with exact float round-tripping, and atomic file replacement.

use std::io::Write as _;
use std::path::Path;

use straw_core::lattice::Lattice;

use crate::errors::AppError;
use crate::harness::ScenarioRun;

/// Serializes a float with 17 significant digits, enough to round-trip any
/// f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empty string for `None`, exact float otherwise.
pub fn fmt_opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Writes a file atomically: temp file in the destination directory, then
/// rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(parent)
        .map_err(|e| AppError::io(&format!("creating temp file near {}", path.display()), e))?;
    tmp.write_all(bytes)
        .map_err(|e| AppError::io(&format!("writing {}", path.display()), e))?;
    tmp.persist(path)
        .map_err(|e| AppError::io(&format!("replacing {}", path.display()), e))?;
    Ok(())
}

/// Per-replication CSV for one scenario run:
/// `scenario,rep,method,fdp,tp,rejections,k_selected,seed`.
pub fn replications_csv(run: &ScenarioRun) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "rep", "method", "fdp", "tp", "rejections", "k_selected", "seed"])
        .expect("in-memory CSV writes cannot fail");
    for rep in &run.replications {
        for m in &rep.methods {
            w.write_record([
                run.config.kind.name().to_string(),
                rep.rep.to_string(),
                m.method.to_string(),
                fmt_float(m.fdp),
                m.tp.to_string(),
                m.rejections.to_string(),
                fmt_opt_float(m.k_selected),
                rep.seed.to_string(),
            ])
            .expect("in-memory CSV writes cannot fail");
        }
    }
    w.into_inner().expect("in-memory CSV writer cannot fail")
}

/// Summary CSV over one or more runs (one sweep point each):
/// `scenario,method,param,fdr,fdr_se,atp,atp_se`.
pub fn summary_csv(runs: &[ScenarioRun]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "method", "param", "fdr", "fdr_se", "atp", "atp_se"])
        .expect("in-memory CSV writes cannot fail");
    for run in runs {
        for s in &run.summaries {
            w.write_record([
                run.config.kind.name().to_string(),
                s.method.to_string(),
                fmt_float(run.config.sweep_value()),
                fmt_float(s.fdr),
                fmt_float(s.fdr_se),
                fmt_float(s.atp),
                fmt_float(s.atp_se),
            ])
            .expect("in-memory CSV writes cannot fail");
        }
    }
    w.into_inner().expect("in-memory CSV writer cannot fail")
}

/// Human-readable summary table for stdout.
pub fn render_summary_table(runs: &[ScenarioRun]) -> String {
    let mut out = String::new();
    if let Some(first) = runs.first() {
        out.push_str(&format!(
            "scenario {}  alpha {}  reps {}  seed {}\n",
            first.config.kind.name(),
            first.run.alpha,
            first.run.reps,
            first.run.base_seed
        ));
    }
    out.push_str(&format!(
        "{:>8}  {:<9} {:>10} {:>10} {:>12} {:>10}\n",
        "param", "method", "fdr", "fdr_se", "atp", "atp_se"
    ));
    for run in runs {
        for s in &run.summaries {
            out.push_str(&format!(
                "{:>8.3}  {:<9} {:>10.4} {:>10.4} {:>12.2} {:>10.2}\n",
                run.config.sweep_value(),
                s.method,
                s.fdr,
                s.fdr_se,
                s.atp,
                s.atp_se
            ));
        }
    }
    out
}

/// A parsed lattice-shaped input file: inferred lattice plus one value per
/// site, stored by row-major linear index.
#[derive(Debug)]
pub struct LatticeTable {
    pub lattice: Lattice,
    pub values: Vec<f64>,
}

/// Reads a CSV with header `coord1[,coord2[,coord3]],<value_column>` (plus
/// ignored extra columns; `#` comment lines skipped) and validates that the
/// rows tile a full regular lattice — every cell present exactly once, with
/// coordinates starting at 1.
pub fn read_lattice_csv(path: &Path, value_column: &str) -> Result<LatticeTable, AppError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(io) => AppError::io(&format!("opening {}", path.display()), io),
            _ => AppError::Usage(format!("reading {}: {e}", path.display())),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| AppError::Usage(format!("reading header of {}: {e}", path.display())))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let coord_cols: Vec<usize> = ["coord1", "coord2", "coord3"]
        .iter()
        .map_while(|name| col(name))
        .collect();
    if coord_cols.is_empty() {
        return Err(AppError::Usage(format!(
            "{}: missing coord1 column",
            path.display()
        )));
    }
    let value_col = col(value_column).ok_or_else(|| {
        AppError::Usage(format!(
            "{}: missing {value_column} column",
            path.display()
        ))
    })?;

    let dim = coord_cols.len();
    let mut coords: Vec<[i64; 3]> = Vec::new();
    let mut raw_values: Vec<f64> = Vec::new();
    let mut maxima = [1i64; 3];
    for (line, row) in reader.records().enumerate() {
        let row = row
            .map_err(|e| AppError::Usage(format!("{} row {}: {e}", path.display(), line + 2)))?;
        let mut c = [1i64; 3];
        for (axis, &ci) in coord_cols.iter().enumerate() {
            let text = row.get(ci).unwrap_or("");
            let v: i64 = text.parse().map_err(|_| {
                AppError::Usage(format!(
                    "{} row {}: bad coordinate {text:?}",
                    path.display(),
                    line + 2
                ))
            })?;
            if v < 1 {
                return Err(AppError::Usage(format!(
                    "{} row {}: coordinates are 1-based, got {v}",
                    path.display(),
                    line + 2
                )));
            }
            c[axis] = v;
            maxima[axis] = maxima[axis].max(v);
        }
        let text = row.get(value_col).unwrap_or("");
        let v: f64 = text.parse().map_err(|_| {
            AppError::Usage(format!(
                "{} row {}: bad {value_column} value {text:?}",
                path.display(),
                line + 2
            ))
        })?;
        coords.push(c);
        raw_values.push(v);
    }
    if coords.is_empty() {
        return Err(AppError::Usage(format!(
            "{}: no data rows",
            path.display()
        )));
    }

    let extents: Vec<usize> = maxima[..dim].iter().map(|&v| v as usize).collect();
    let lattice = Lattice::new(&extents)
        .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
    if coords.len() != lattice.num_sites() {
        return Err(AppError::Usage(format!(
            "{}: incomplete lattice ({} rows for extents {:?}, expected {})",
            path.display(),
            coords.len(),
            extents,
            lattice.num_sites()
        )));
    }
    let mut values = vec![f64::NAN; lattice.num_sites()];
    let mut seen = vec![false; lattice.num_sites()];
    for (c, v) in coords.into_iter().zip(raw_values) {
        let site = lattice
            .site(&c[..dim])
            .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
        let idx = lattice
            .linear_index(&site)
            .expect("site was validated against the lattice");
        if seen[idx] {
            return Err(AppError::Usage(format!(
                "{}: duplicate site {:?}",
                path.display(),
                &c[..dim]
            )));
        }
        seen[idx] = true;
        values[idx] = v;
    }
    if !seen.iter().all(|&s| s) {
        return Err(AppError::Usage(format!(
            "{}: incomplete lattice",
            path.display()
        )));
    }
    Ok(LatticeTable { lattice, values })
}

/// Validates that every value is a p-value in `[0, 1]`.
pub fn validate_probabilities(table: &LatticeTable, path: &Path) -> Result<(), AppError> {
    for (i, &v) in table.values.iter().enumerate() {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            let site = table
                .lattice
                .site_at(i)
                .expect("index bounded by lattice size");
            return Err(AppError::Usage(format!(
                "{}: p-value {v} at site {:?} outside [0, 1]",
                path.display(),
                site.coords()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[0.0, 0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.049999999999999996] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_opt_float(None), "");
    }

    #[test]
    fn lattice_csv_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("in.csv");

        // 2x2 lattice in scrambled order with a comment line
        std::fs::write(
            &path,
            "# test file\ncoord1,coord2,p\n2,1,0.25\n1,1,0.5\n2,2,0.75\n1,2,1.0\n",
        )
        .unwrap();
        let table = read_lattice_csv(&path, "p").unwrap();
        assert_eq!(table.lattice.extents(), &[2, 2]);
        assert_eq!(table.values, vec![0.5, 1.0, 0.25, 0.75]);

        // missing a cell
        std::fs::write(&path, "coord1,p\n1,0.5\n3,0.5\n").unwrap();
        let err = read_lattice_csv(&path, "p").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("incomplete lattice"));

        // duplicate cell
        std::fs::write(&path, "coord1,p\n1,0.5\n1,0.7\n").unwrap();
        let err = read_lattice_csv(&path, "p").unwrap_err();
        assert_eq!(err.exit_code(), 2);

        // unreadable path is an I/O error
        let err = read_lattice_csv(&dir.path().join("absent.csv"), "p").unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
    }
}
