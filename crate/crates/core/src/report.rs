//! JSON and CSV emission of reports, and parsing them back.
//!
//! JSON floats use the shortest representation that round-trips. CSV floats
//! are written with 17 significant digits.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{EstimateReport, ExpectedChangeReport, VarianceScanReport};

pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// `{:.16e}`: 17 significant digits, enough to recover any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn write_rows(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn read_rows<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// One estimate replicate as a CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub replicate: usize,
    /// Master seed; the replicate's stream is its index.
    pub seed: u64,
    #[serde(rename = "L_S")]
    pub l_s: f64,
    #[serde(rename = "L_SmT")]
    pub l_smt: f64,
    pub x_r: f64,
    pub wall_ms: Option<f64>,
}

pub fn estimate_rows(report: &EstimateReport) -> Vec<EstimateRow> {
    report
        .replicates
        .iter()
        .map(|r| EstimateRow {
            replicate: r.replicate,
            seed: report.config.master_seed,
            l_s: r.l_s,
            l_smt: r.l_smt,
            x_r: r.x,
            wall_ms: r.wall_ms,
        })
        .collect()
}

pub fn estimate_csv(report: &EstimateReport) -> Result<String> {
    write_rows(
        &["replicate", "seed", "L_S", "L_SmT", "x_r", "wall_ms"],
        estimate_rows(report).into_iter().map(|r| {
            vec![
                r.replicate.to_string(),
                r.seed.to_string(),
                fmt_f64(r.l_s),
                fmt_f64(r.l_smt),
                fmt_f64(r.x_r),
                fmt_opt(r.wall_ms),
            ]
        }),
    )
}

pub fn parse_estimate_csv(text: &str) -> Result<Vec<EstimateRow>> {
    read_rows(text)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceCsvRow {
    pub n: usize,
    pub replicates: usize,
    pub mean: f64,
    pub variance: f64,
    pub variance_over_n: f64,
}

/// One row per length; lengths without a defined variance are left out.
pub fn variance_csv(report: &VarianceScanReport) -> Result<String> {
    write_rows(
        &["n", "replicates", "mean", "variance", "variance_over_n"],
        report.rows.iter().filter(|r| !r.flagged()).map(|r| {
            vec![
                r.n.to_string(),
                r.replicates.to_string(),
                fmt_f64(r.mean),
                fmt_opt(r.variance),
                fmt_opt(r.variance_over_n),
            ]
        }),
    )
}

pub fn parse_variance_csv(text: &str) -> Result<Vec<VarianceCsvRow>> {
    read_rows(text)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedChangeCsvRow {
    pub replicate: usize,
    pub seed: u64,
    pub occurrences: usize,
    pub exact_change: f64,
    pub t_lower_bound: f64,
    pub x_r: f64,
    pub chain_bound: f64,
    pub wall_ms: Option<f64>,
}

pub fn expected_change_csv(report: &ExpectedChangeReport) -> Result<String> {
    write_rows(
        &[
            "replicate",
            "seed",
            "occurrences",
            "exact_change",
            "t_lower_bound",
            "x_r",
            "chain_bound",
            "wall_ms",
        ],
        report.records.iter().map(|r| {
            vec![
                r.replicate.to_string(),
                report.config.master_seed.to_string(),
                r.occurrences.to_string(),
                fmt_f64(r.exact_change),
                fmt_f64(r.t_lower_bound),
                fmt_f64(r.x),
                fmt_f64(r.chain_bound),
                fmt_opt(r.wall_ms),
            ]
        }),
    )
}

pub fn parse_expected_change_csv(text: &str) -> Result<Vec<ExpectedChangeCsvRow>> {
    read_rows(text)
}
