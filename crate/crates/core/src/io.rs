//! File formats: dataset CSV, model JSON, histogram CSV and report JSON.
//!
//! The dataset schema is `L,Ld,tsi,tox,VC,VD[,VT]` with one row per sample.
//! Columns are bound by header name, so any column order parses identically.
//! Floating values are written in shortest round-trip decimal form; reading a
//! file back reproduces the original values bit-for-bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Histogram;
use crate::oracle::{DeviceInputs, INPUT_COUNT, INPUT_NAMES};
use crate::regressors::{InputScaler, MonomialBasis};
use crate::signal::Dataset;
use crate::solver::{FitReport, SurrogateModel};

/// Output column name.
pub const OUTPUT_NAME: &str = "VT";

/// Current model file version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Writes a dataset as CSV. The `VT` column is present iff the dataset is
/// labeled.
pub fn write_dataset_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    dataset.validate()?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header: Vec<&str> = INPUT_NAMES.to_vec();
    if dataset.outputs.is_some() {
        header.push(OUTPUT_NAME);
    }
    writer.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for (k, row) in dataset.inputs.iter().enumerate() {
        record.clear();
        for v in row.as_array() {
            record.push(format_float(v));
        }
        if let Some(outputs) = &dataset.outputs {
            record.push(format_float(outputs[k]));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Shortest decimal expansion that parses back to the same bits; the
/// standard float formatter guarantees exact round-tripping.
fn format_float(v: f64) -> String {
    format!("{v}")
}

/// Reads a dataset CSV, binding columns by header name.
pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let mut reader = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = reader.headers()?.clone();
    let mut input_cols = [usize::MAX; INPUT_COUNT];
    let mut output_col = None;
    for (idx, name) in headers.iter().enumerate() {
        if let Some(slot) = INPUT_NAMES.iter().position(|n| *n == name) {
            if input_cols[slot] != usize::MAX {
                return Err(Error::Data(format!("duplicate column '{name}'")));
            }
            input_cols[slot] = idx;
        } else if name == OUTPUT_NAME {
            if output_col.is_some() {
                return Err(Error::Data(format!("duplicate column '{name}'")));
            }
            output_col = Some(idx);
        } else {
            return Err(Error::Data(format!("unknown column '{name}'")));
        }
    }
    for (slot, idx) in input_cols.iter().enumerate() {
        if *idx == usize::MAX {
            return Err(Error::Data(format!(
                "missing column '{}'",
                INPUT_NAMES[slot]
            )));
        }
    }

    let mut inputs = Vec::new();
    let mut outputs = output_col.map(|_| Vec::new());
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |idx: usize| -> Result<f64> {
            let field = record
                .get(idx)
                .ok_or_else(|| Error::Data(format!("row {k} is missing column {idx}")))?;
            field
                .parse::<f64>()
                .map_err(|e| Error::Data(format!("row {k}, column {idx}: {e}")))
        };
        let mut vals = [0.0; INPUT_COUNT];
        for (slot, idx) in input_cols.iter().enumerate() {
            vals[slot] = parse(*idx)?;
        }
        inputs.push(DeviceInputs::from_array(vals));
        if let (Some(out), Some(idx)) = (outputs.as_mut(), output_col) {
            out.push(parse(idx)?);
        }
    }

    let provenance = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    let ds = Dataset {
        inputs,
        outputs,
        provenance,
    };
    // anything wrong with the parsed rows is a malformed-file problem
    ds.validate()
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    Ok(ds)
}

/// On-disk model layout, version-gated.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    m: usize,
    include_bias: bool,
    terms: Vec<u32>,
    theta: Vec<f64>,
    scaler: Option<ScalerFile>,
    fit_report: FitReport,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalerFile {
    offsets: Vec<f64>,
    gains: Vec<f64>,
}

/// Saves a fitted model as JSON.
pub fn save_model(path: &Path, model: &SurrogateModel) -> Result<()> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        m: model.basis.input_count(),
        include_bias: model.basis.include_bias(),
        terms: model.basis.terms().to_vec(),
        theta: model.theta.clone(),
        scaler: model.scaler.as_ref().map(|s| ScalerFile {
            offsets: s.offsets().to_vec(),
            gains: s.gains().to_vec(),
        }),
        fit_report: model.fit_report.clone(),
    };
    write_json(path, &file)
}

/// Loads a model saved by [`save_model`], rejecting unknown versions and
/// malformed term lists.
pub fn load_model(path: &Path) -> Result<SurrogateModel> {
    let file: ModelFile = read_json(path)?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Data(format!(
            "unsupported model format_version {} (expected {MODEL_FORMAT_VERSION})",
            file.format_version
        )));
    }
    let basis = MonomialBasis::from_parts(file.m, file.include_bias, file.terms)?;
    if file.theta.len() != basis.column_count() {
        return Err(Error::Data(format!(
            "model has {} coefficients but the basis has {} columns",
            file.theta.len(),
            basis.column_count()
        )));
    }
    if file.theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::Data("model coefficients must be finite".into()));
    }
    let scaler = file
        .scaler
        .map(|s| InputScaler::from_parts(s.offsets, s.gains))
        .transpose()?;
    Ok(SurrogateModel {
        theta: file.theta,
        basis,
        scaler,
        fit_report: file.fit_report,
    })
}

/// Writes a histogram as two-column CSV `bin_center,normalized_count`.
pub fn write_histogram_csv(path: &Path, histogram: &Histogram) -> Result<()> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    writer.write_record(["bin_center", "normalized_count"])?;
    for (center, count) in histogram.centers().iter().zip(&histogram.counts) {
        writer.write_record([format_float(*center), format_float(*count)])?;
    }
    writer.flush()?;
    Ok(())
}

/// Pretty-printed JSON writer for reports and models.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// JSON reader counterpart of [`write_json`].
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(file)?)
}
