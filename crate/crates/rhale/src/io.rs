//! File formats: CSV matrices (full double precision, '.' decimals, '\n'
//! line endings) and the JSON report documents written by the CLI.
//!
//! Every document carries a `kind` discriminator matching the shipped
//! `schemas/output.schema.json`. Serialization is deterministic: struct field
//! order is fixed and floats print in shortest round-trip form, so identical
//! inputs produce byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::baselines::{AleCurve, GridCurve, IceBundle};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::estimator::{BinStats, EffectResult};
use crate::evaluation::BenchmarkReport;
use crate::synthetic::{ground_truth, Example, GeneratorSpec, GtSource};

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn new_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes a numeric table with a header row.
pub fn write_table_csv(path: &Path, headers: &[String], rows: &mut dyn Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = new_writer(path)?;
    w.write_record(headers).map_err(|e| csv_err(path, e))?;
    for row in rows {
        let rec: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Writes the feature matrix (and optionally a trailing target column).
pub fn write_dataset_csv(
    path: &Path,
    data: &FeatureMatrix,
    targets: Option<&[f64]>,
) -> Result<()> {
    let mut headers: Vec<String> = (0..data.n_cols()).map(|s| data.column_name(s)).collect();
    if targets.is_some() {
        headers.push("y".to_string());
    }
    let n = data.n_rows();
    let mut rows = (0..n).map(|i| {
        let mut row: Vec<f64> = data.row(i).to_vec();
        if let Some(y) = targets {
            row.push(y[i]);
        }
        row
    });
    write_table_csv(path, &headers, &mut rows)
}

/// Reads a headed numeric CSV into (headers, row-major values, row count).
pub fn read_table_csv(path: &Path) -> Result<(Vec<String>, Vec<f64>, usize)> {
    let file = fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() {
        return Err(Error::Csv {
            path: path.display().to_string(),
            message: "missing header row".into(),
        });
    }
    let mut values = Vec::new();
    let mut n_rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        if record.len() != headers.len() {
            return Err(Error::Csv {
                path: path.display().to_string(),
                message: format!(
                    "row {} has {} fields, expected {}",
                    i + 1,
                    record.len(),
                    headers.len()
                ),
            });
        }
        for field in record.iter() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Csv {
                path: path.display().to_string(),
                message: format!("row {}: not a number: {field:?}", i + 1),
            })?;
            values.push(v);
        }
        n_rows += 1;
    }
    Ok((headers, values, n_rows))
}

/// Reads a dataset CSV. A trailing column named "y" is split off as targets;
/// the remaining columns become the feature matrix.
pub fn read_dataset_csv(path: &Path) -> Result<(FeatureMatrix, Option<Vec<f64>>)> {
    let (headers, values, n_rows) = read_table_csv(path)?;
    let n_cols = headers.len();
    let has_y = headers.last().map(|h| h == "y").unwrap_or(false);
    let d = if has_y { n_cols - 1 } else { n_cols };
    if d == 0 {
        return Err(Error::Csv {
            path: path.display().to_string(),
            message: "no feature columns".into(),
        });
    }
    let mut feats = Vec::with_capacity(n_rows * d);
    let mut targets = if has_y { Some(Vec::with_capacity(n_rows)) } else { None };
    for i in 0..n_rows {
        let row = &values[i * n_cols..(i + 1) * n_cols];
        feats.extend_from_slice(&row[..d]);
        if let Some(t) = targets.as_mut() {
            t.push(row[d]);
        }
    }
    let matrix = FeatureMatrix::new(feats, n_rows, d)?
        .with_column_names(headers[..d].to_vec())?;
    Ok((matrix, targets))
}

/// Reads a gradients CSV: same shape as the dataset's features, one column
/// of ∂f/∂x_s values per feature. Unlike features, gradient columns may be
/// constant, so this does not build a `FeatureMatrix`.
pub fn read_gradients_csv(path: &Path) -> Result<(Vec<String>, Vec<f64>, usize)> {
    let (headers, values, n_rows) = read_table_csv(path)?;
    if n_rows == 0 {
        return Err(Error::Csv {
            path: path.display().to_string(),
            message: "no data rows".into(),
        });
    }
    Ok((headers, values, n_rows))
}

/// Writes pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let mut file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Parses a partition limits file: a JSON array of numbers.
pub fn read_partition_json(path: &Path) -> Result<crate::binning::Partition> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let limits: Vec<f64> = serde_json::from_str(&text)?;
    crate::binning::Partition::new(limits)
}

/// Sampled curve as parallel arrays, the JSON-friendly curve form.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CurveDoc {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl CurveDoc {
    pub fn from_knots(knots: &[(f64, f64)]) -> Self {
        CurveDoc {
            x: knots.iter().map(|k| k.0).collect(),
            y: knots.iter().map(|k| k.1).collect(),
        }
    }

    pub fn from_grid_curve(c: &GridCurve) -> Self {
        CurveDoc {
            x: c.grid.clone(),
            y: c.values.clone(),
        }
    }
}

/// effect.json: the explanation document.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EffectDoc {
    pub kind: String,
    pub feature_index: usize,
    pub feature_name: String,
    pub binning: String,
    pub source: String,
    pub objective: Option<f64>,
    pub partition: Vec<f64>,
    pub bins: Vec<BinStats>,
    pub curve: CurveDoc,
    pub envelope: CurveDoc,
    pub centered: bool,
    pub centering_offset: f64,
    pub warnings: Vec<String>,
}

impl EffectDoc {
    pub fn new(result: &EffectResult, feature_name: String, binning: String) -> Self {
        EffectDoc {
            kind: "effect".to_string(),
            feature_index: result.feature_index,
            feature_name,
            binning,
            source: match result.source {
                crate::model::EffectSource::Analytic => "analytic".to_string(),
                crate::model::EffectSource::FiniteDifference { step } => {
                    format!("finite_difference(step={step})")
                }
            },
            objective: result.objective,
            partition: result.partition.limits().to_vec(),
            bins: result.bins.clone(),
            curve: CurveDoc::from_knots(&result.curve_knots()),
            envelope: CurveDoc::from_knots(&result.envelope_knots()),
            centered: result.centered,
            centering_offset: result.centering_offset,
            warnings: result.warnings.clone(),
        }
    }
}

/// pdp_ice.json: the baseline comparison document.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PdpIceDoc {
    pub kind: String,
    pub feature_index: usize,
    pub feature_name: String,
    pub grid: Vec<f64>,
    pub pdp: Vec<f64>,
    pub ice_centered: bool,
    pub ice: Vec<Vec<f64>>,
}

impl PdpIceDoc {
    pub fn new(
        feature_index: usize,
        feature_name: String,
        pdp: &GridCurve,
        ice: &IceBundle,
    ) -> Self {
        PdpIceDoc {
            kind: "pdp_ice".to_string(),
            feature_index,
            feature_name,
            grid: pdp.grid.clone(),
            pdp: pdp.values.clone(),
            ice_centered: ice.centered,
            ice: ice.curves.clone(),
        }
    }
}

/// One feature's entry in ground_truth.json.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroundTruthFeatureDoc {
    pub name: String,
    pub support: Option<(f64, f64)>,
    /// "closed_form", "dense_oracle", or null when undefined.
    pub source: Option<String>,
    pub effect: Option<CurveDoc>,
    pub heterogeneity: Option<CurveDoc>,
}

/// ground_truth.json: closed-form reference curves sampled on a grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroundTruthDoc {
    pub kind: String,
    pub example: Example,
    pub n: usize,
    pub seed: u64,
    pub features: Vec<GroundTruthFeatureDoc>,
}

impl GroundTruthDoc {
    /// Samples each covered feature's closed forms on a 101-point grid over
    /// its support (the observed range when unbounded).
    pub fn new(spec: &GeneratorSpec, data: &FeatureMatrix) -> Self {
        let mut features = Vec::new();
        for s in 0..spec.example.n_features() {
            let name = data.column_name(s);
            match ground_truth(&spec.example, s) {
                Ok(gt) => {
                    let (lo, hi) = gt.support.unwrap_or_else(|| data.feature_range(s));
                    let grid: Vec<f64> =
                        (0..=100).map(|i| lo + (hi - lo) * i as f64 / 100.0).collect();
                    let sample = |f: &dyn Fn(f64) -> Option<f64>| -> Option<CurveDoc> {
                        let ys: Option<Vec<f64>> = grid.iter().map(|&z| f(z)).collect();
                        ys.map(|y| CurveDoc {
                            x: grid.clone(),
                            y,
                        })
                    };
                    features.push(GroundTruthFeatureDoc {
                        name,
                        support: gt.support,
                        source: Some(
                            match gt.source {
                                GtSource::ClosedForm => "closed_form",
                                GtSource::DenseOracle => "dense_oracle",
                            }
                            .to_string(),
                        ),
                        effect: sample(&|z| gt.effect_at(z)),
                        heterogeneity: sample(&|z| gt.heterogeneity_at(z)),
                    });
                }
                Err(_) => features.push(GroundTruthFeatureDoc {
                    name,
                    support: spec.example.support(s),
                    source: None,
                    effect: None,
                    heterogeneity: None,
                }),
            }
        }
        GroundTruthDoc {
            kind: "ground_truth".to_string(),
            example: spec.example,
            n: spec.n,
            seed: spec.seed,
            features,
        }
    }
}

/// bench.json: the benchmark report plus the document discriminator.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BenchDoc {
    pub kind: String,
    #[serde(flatten)]
    pub report: BenchmarkReport,
}

impl BenchDoc {
    pub fn new(report: BenchmarkReport) -> Self {
        BenchDoc {
            kind: "benchmark".to_string(),
            report,
        }
    }
}

/// bench.csv: one row per (trial, method); empty cells mark infeasible runs.
pub fn write_bench_csv(path: &Path, report: &BenchmarkReport) -> Result<()> {
    let mut w = new_writer(path)?;
    w.write_record([
        "trial", "seed", "method", "k", "n_bins", "l_mu", "l_sigma", "l_rho",
    ])
    .map_err(|e| csv_err(path, e))?;
    let opt_u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    let opt_f = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    for r in &report.rows {
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.method.clone(),
            opt_u(r.k),
            opt_u(r.n_bins),
            opt_f(r.l_mu),
            opt_f(r.l_sigma),
            opt_f(r.l_rho),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Gradient table for a synthetic dataset: ∂f/∂x_s per row and feature.
pub fn gradients_table(data: &FeatureMatrix, model: &dyn crate::model::Model) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let headers: Vec<String> = (0..data.n_cols()).map(|s| data.column_name(s)).collect();
    let mut rows = Vec::with_capacity(data.n_rows());
    for i in 0..data.n_rows() {
        let g = model
            .gradient(data.row(i))
            .ok_or_else(|| Error::capability("model has no gradient"))?;
        rows.push(g);
    }
    Ok((headers, rows))
}

/// Classic-ALE section embedded in comparison documents.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AleDoc {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub bin_effects: Vec<f64>,
    pub empty_bins: Vec<usize>,
}

impl AleDoc {
    pub fn new(ale: &AleCurve) -> Self {
        AleDoc {
            grid: ale.curve.grid.clone(),
            values: ale.curve.values.clone(),
            bin_effects: ale.bin_effects.clone(),
            empty_bins: ale.empty_bins.clone(),
        }
    }
}
