//! CSV artifacts. Floats carry 17 significant digits so every value
//! round-trips to the same `f64`.

use std::fs;
use std::path::Path;

use precursor_core::BoundReport;

use crate::error::{CliError, Result};
use crate::run::Manifest;

pub const LHS_FILE: &str = "lhs_grid.csv";
pub const RHS_FILE: &str = "rhs_terms.csv";
pub const REVIVALS_FILE: &str = "revivals.csv";
pub const STEADY_FILE: &str = "steady_trace.csv";
pub const INFO_FILE: &str = "info_decomposition.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let path = dir.join(name);
    let fail = |e: csv::Error| CliError::Write { path: path.clone(), source: e.into() };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path).map_err(fail)?;
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|source| CliError::Write { path: path.clone(), source })
}

/// Writes every CSV for `report` and returns the file names. A stale
/// information table from an earlier run in the same directory is removed.
pub fn write_all(dir: &Path, report: &BoundReport) -> Result<Vec<String>> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.into(), source })?;
    write_csv(
        dir,
        LHS_FILE,
        &["s", "t", "lhs"],
        report.lhs.entries().map(|(s, t, v)| vec![s.to_string(), t.to_string(), float(v)]),
    )?;
    write_csv(
        dir,
        RHS_FILE,
        &["s", "k", "env_term", "corr1", "corr2", "sum"],
        report.rhs.iter().map(|r| {
            let t = &r.terms;
            vec![r.s.to_string(), r.k.to_string(), float(t.env), float(t.corr1), float(t.corr2), float(t.sum())]
        }),
    )?;
    write_csv(
        dir,
        REVIVALS_FILE,
        &["s", "any_revival", "max_revival", "first_t"],
        report.revivals.rows.iter().map(|r| {
            vec![r.s.to_string(), r.any.to_string(), float(r.max), r.first_t.map(|t| t.to_string()).unwrap_or_default()]
        }),
    )?;
    write_csv(
        dir,
        STEADY_FILE,
        &["n", "f_system", "f_incoming"],
        report.steady.iter().map(|p| vec![p.n.to_string(), float(p.f_system), float(p.f_incoming)]),
    )?;
    let mut files: Vec<String> = [LHS_FILE, RHS_FILE, REVIVALS_FILE, STEADY_FILE].map(String::from).into();
    let info_path = dir.join(INFO_FILE);
    match &report.info {
        Some(info) => {
            write_csv(
                dir,
                INFO_FILE,
                &["t", "i_tot", "i_int", "i_ext"],
                (0..info.i_tot.len())
                    .map(|t| vec![t.to_string(), float(info.i_tot[t]), float(info.i_int[t]), float(info.i_ext[t])]),
            )?;
            files.push(INFO_FILE.into());
        }
        None if info_path.exists() => {
            fs::remove_file(&info_path).map_err(|source| CliError::Write { path: info_path, source })?;
        }
        None => {}
    }
    Ok(files)
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<()> {
    let path = dir.join(MANIFEST_FILE);
    let text = toml::to_string(manifest).expect("manifest serializes to TOML");
    fs::write(&path, text).map_err(|source| CliError::Write { path, source })
}
