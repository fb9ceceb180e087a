//! Report types and their CSV/JSON emission.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

pub const PROPAGATE_HEADER: [&str; 9] = [
    "N",
    "n",
    "amp_re",
    "amp_im",
    "exact_re",
    "exact_im",
    "abs_error",
    "trunc_loss",
    "wall_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    #[serde(flatten)]
    pub body: ReportBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "kebab-case")]
pub enum ReportBody {
    Symbols(SymbolsReport),
    Quantize(QuantizeReport),
    Propagate(PropagateReport),
    Bosonize(BosonizeReport),
    IdentityCheck(IdentityReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolsReport {
    pub canonical: String,
    pub modes: usize,
    pub degree: u32,
    pub terms: usize,
    pub is_real: bool,
    pub reality_defect: f64,
    /// Normal symbol of the operator whose anti-normal symbol is the input.
    pub normal_from_antinormal: String,
    /// Anti-normal symbol of the operator whose normal symbol is the input.
    pub antinormal_from_normal: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizeReport {
    pub basis: Vec<String>,
    /// Row-major `[re, im]` entries.
    pub normal: Vec<Vec<[f64; 2]>>,
    pub antinormal: Vec<Vec<[f64; 2]>>,
    pub hermitian: bool,
    pub normal_min_eigenvalue: Option<f64>,
    pub antinormal_min_eigenvalue: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagateRow {
    #[serde(rename = "N")]
    pub slices: usize,
    pub n: usize,
    pub amp_re: f64,
    pub amp_im: f64,
    pub exact_re: f64,
    pub exact_im: f64,
    pub abs_error: f64,
    pub trunc_loss: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub n: usize,
    pub strictly_decreasing: bool,
    /// `None` where a ratio is not finite.
    pub log2_ratios: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagateReport {
    pub rows: Vec<PropagateRow>,
    pub trends: Vec<Trend>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BosonizeReport {
    pub modes: usize,
    pub cutoff: u32,
    /// Image dimension per grade `0..=d`.
    pub grade_dims: Vec<usize>,
    pub hard_core_dim: usize,
    pub isometry_residual: f64,
    pub inverse_residual: f64,
    pub number_operator_residual: f64,
    pub car_residual_grassmann: f64,
    pub car_residual_bosonized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub modes: usize,
    pub cutoff: u32,
    pub nodes: usize,
    pub residual: f64,
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(buf)
}

fn render_csv(body: &ReportBody) -> Result<String, CliError> {
    let mut buf = Vec::new();
    {
        let mut w = csv_writer(&mut buf);
        match body {
            ReportBody::Propagate(p) => {
                w.write_record(PROPAGATE_HEADER)?;
                for r in &p.rows {
                    w.serialize(r)?;
                }
            }
            ReportBody::IdentityCheck(r) => {
                w.write_record(["modes", "cutoff", "nodes", "residual"])?;
                w.serialize(r)?;
            }
            ReportBody::Quantize(q) => {
                w.write_record(["ordering", "row", "col", "re", "im"])?;
                for (name, m) in [("normal", &q.normal), ("antinormal", &q.antinormal)] {
                    for (r, row) in m.iter().enumerate() {
                        for (c, [re, im]) in row.iter().enumerate() {
                            if *re != 0.0 || *im != 0.0 {
                                w.serialize((name, r, c, re, im))?;
                            }
                        }
                    }
                }
            }
            ReportBody::Symbols(s) => {
                w.write_record(["quantity", "value"])?;
                let rows = [
                    ("canonical", s.canonical.clone()),
                    ("modes", s.modes.to_string()),
                    ("degree", s.degree.to_string()),
                    ("terms", s.terms.to_string()),
                    ("is_real", s.is_real.to_string()),
                    ("reality_defect", s.reality_defect.to_string()),
                    ("normal_from_antinormal", s.normal_from_antinormal.clone()),
                    ("antinormal_from_normal", s.antinormal_from_normal.clone()),
                ];
                for r in rows {
                    w.serialize(r)?;
                }
            }
            ReportBody::Bosonize(b) => {
                w.write_record(["quantity", "value"])?;
                let dims: Vec<String> = b.grade_dims.iter().map(|d| d.to_string()).collect();
                let rows = [
                    ("modes", b.modes.to_string()),
                    ("cutoff", b.cutoff.to_string()),
                    ("grade_dims", dims.join(" ")),
                    ("hard_core_dim", b.hard_core_dim.to_string()),
                    ("isometry_residual", b.isometry_residual.to_string()),
                    ("inverse_residual", b.inverse_residual.to_string()),
                    (
                        "number_operator_residual",
                        b.number_operator_residual.to_string(),
                    ),
                    (
                        "car_residual_grassmann",
                        b.car_residual_grassmann.to_string(),
                    ),
                    (
                        "car_residual_bosonized",
                        b.car_residual_bosonized.to_string(),
                    ),
                ];
                for r in rows {
                    w.serialize(r)?;
                }
            }
        }
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

/// Report text in the requested format.
pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => render_csv(&report.body),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Write the report to `path`, or to stdout when absent.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = render(report, format)?;
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Parse a JSON report produced by [`render`].
pub fn parse_json_report(text: &str) -> Result<Report, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Io(e.to_string()))
}

/// JSON value with every `wall_ms` field zeroed, for determinism comparisons.
pub fn without_wall_time(text: &str) -> Result<serde_json::Value, CliError> {
    fn scrub(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, x) in map.iter_mut() {
                    if k == "wall_ms" {
                        *x = serde_json::Value::from(0.0);
                    } else {
                        scrub(x);
                    }
                }
            }
            serde_json::Value::Array(xs) => xs.iter_mut().for_each(scrub),
            _ => {}
        }
    }
    let mut v: serde_json::Value = serde_json::from_str(text)?;
    scrub(&mut v);
    Ok(v)
}
