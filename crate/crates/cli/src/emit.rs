//! File emission: one CSV per scan, an optional V/D table, and a JSON
//! summary carrying the duality reports and full provenance.

use crate::config::RunConfig;
use serde::Serialize;
use spdc_core::{DualityReport, ParamValue, ResultBundle, RunMode};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Twelve significant digits, round-trippable.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn round12(x: f64) -> f64 {
    sig12(x).parse().expect("formatted float")
}

fn write_file(path: &Path, contents: &str) -> Result<(), EmitError> {
    let mut file = std::fs::File::create(path).map_err(|source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(contents.as_bytes())
        .map_err(|source| EmitError::Io {
            path: path.to_path_buf(),
            source,
        })
}

#[derive(Serialize)]
struct ScanIndexEntry {
    name: String,
    detector: String,
    file: String,
}

#[derive(Serialize)]
struct RoundedReport {
    name: String,
    visibility: f64,
    distinguishability: f64,
    duality_sum: f64,
    sigma_v: f64,
    sigma_d: f64,
    method: spdc_core::VisibilityMethod,
    violation: bool,
}

impl RoundedReport {
    fn new(name: &str, r: &DualityReport) -> Self {
        Self {
            name: name.to_string(),
            visibility: round12(r.visibility),
            distinguishability: round12(r.distinguishability),
            duality_sum: round12(r.duality_sum),
            sigma_v: round12(r.sigma_v),
            sigma_d: round12(r.sigma_d),
            method: r.method,
            violation: r.violation,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    scenario: String,
    version: String,
    seed: u64,
    mode: RunMode,
    parameters: BTreeMap<String, ParamValue>,
    duality_reports: Vec<RoundedReport>,
    scans: Vec<ScanIndexEntry>,
    vd_scan_file: Option<String>,
}

/// Write the bundle per the requested formats; returns the created paths.
pub fn emit(bundle: &ResultBundle, config: &RunConfig) -> Result<Vec<PathBuf>, EmitError> {
    std::fs::create_dir_all(&config.out_dir).map_err(|source| EmitError::Io {
        path: config.out_dir.clone(),
        source,
    })?;
    let mut written = Vec::new();
    let mode_tag = config.mode.name();

    let mut scan_index = Vec::new();
    for named in &bundle.scans {
        let file = format!("{}_{}_{}.csv", bundle.scenario, named.name, mode_tag);
        if config.formats.csv {
            let mut text = String::from("scan_parameter,rate,stderr\n");
            for (k, (&p, &r)) in named
                .scan
                .parameter
                .iter()
                .zip(&named.scan.rates)
                .enumerate()
            {
                let stderr = named
                    .scan
                    .std_errors
                    .get(k)
                    .map(|s| sig12(*s))
                    .unwrap_or_default();
                writeln!(text, "{},{},{}", sig12(p), sig12(r), stderr).unwrap();
            }
            let path = config.out_dir.join(&file);
            write_file(&path, &text)?;
            written.push(path);
        }
        scan_index.push(ScanIndexEntry {
            name: named.name.clone(),
            detector: named.scan.detector.clone(),
            file,
        });
    }

    let mut vd_file = None;
    if let Some(table) = &bundle.vd_table {
        let file = "vd_scan.csv".to_string();
        if config.formats.csv {
            let mut text = format!("{},V,D,duality_sum\n", table.parameter_name);
            for row in &table.rows {
                writeln!(
                    text,
                    "{},{},{},{}",
                    sig12(row[0]),
                    sig12(row[1]),
                    sig12(row[2]),
                    sig12(row[3])
                )
                .unwrap();
            }
            let path = config.out_dir.join(&file);
            write_file(&path, &text)?;
            written.push(path);
        }
        vd_file = Some(file);
    }

    if config.formats.json {
        let summary = Summary {
            scenario: bundle.scenario.clone(),
            version: bundle.version.clone(),
            seed: bundle.seed,
            mode: bundle.mode,
            parameters: bundle.parameters.clone(),
            duality_reports: bundle
                .duality
                .iter()
                .map(|r| RoundedReport::new(&r.name, &r.report))
                .collect(),
            scans: scan_index,
            vd_scan_file: vd_file,
        };
        let path = config.out_dir.join("summary.json");
        let text = serde_json::to_string_pretty(&summary).expect("serializable summary");
        write_file(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}
