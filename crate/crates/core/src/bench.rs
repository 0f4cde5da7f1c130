//! Wall-clock batch timing of reference and surrogate evaluators.
//!
//! Timing uses the monotonic [`std::time::Instant`] clock, runs untimed
//! warmups followed by repeated timed full-batch evaluations, and retains a
//! bit-level checksum of the outputs so the work cannot be elided. The timed
//! region covers evaluation only; dataset generation, labeling and I/O stay
//! outside. Measurements are single-threaded to keep them stable; the
//! parallel helper below is for throughput exploration and is not used for
//! speed-up reporting.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{threshold_voltage, DeviceInputs, OracleParams};
use crate::signal::Dataset;
use crate::solver::SurrogateModel;

/// How repeated run samples collapse into the reported runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Middle sample (mean of the middle two for even counts). Default.
    #[default]
    Median,
    Min,
    Mean,
}

impl Aggregation {
    pub fn apply(self, samples: &[f64]) -> f64 {
        match self {
            Aggregation::Median => {
                let mut sorted = samples.to_vec();
                sorted.sort_by(|a, b| a.total_cmp(b));
                let mid = sorted.len() / 2;
                if sorted.len() % 2 == 1 {
                    sorted[mid]
                } else {
                    0.5 * (sorted[mid - 1] + sorted[mid])
                }
            }
            Aggregation::Min => samples.iter().cloned().fold(f64::INFINITY, f64::min),
            Aggregation::Mean => samples.iter().sum::<f64>() / samples.len() as f64,
        }
    }
}

/// Repetition discipline for one timing measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub warmup_runs: usize,
    pub measured_runs: usize,
    pub aggregation: Aggregation,
    /// Dataset size used when the caller generates a benchmark dataset.
    pub n: usize,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.measured_runs < 1 {
            return Err(Error::Config("measured_runs must be at least 1".into()));
        }
        if self.n < 1 {
            return Err(Error::Config(
                "bench dataset size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for BenchConfig {
    /// Median of 11 measured runs after 3 warmups.
    fn default() -> Self {
        Self {
            warmup_runs: 3,
            measured_runs: 11,
            aggregation: Aggregation::Median,
            n: 10_000,
        }
    }
}

/// Whole-batch evaluator: reference model or fitted surrogate.
pub trait BatchEvaluator {
    /// Evaluates every row in order, appending to `out`. A row failure
    /// reports its index.
    fn evaluate_batch(&self, inputs: &[DeviceInputs], out: &mut Vec<f64>) -> Result<()>;

    /// Short name for reports.
    fn label(&self) -> &str;
}

impl BatchEvaluator for OracleParams {
    fn evaluate_batch(&self, inputs: &[DeviceInputs], out: &mut Vec<f64>) -> Result<()> {
        out.reserve(inputs.len());
        for (k, row) in inputs.iter().enumerate() {
            out.push(threshold_voltage(self, row).map_err(|e| e.at_row(k))?);
        }
        Ok(())
    }

    fn label(&self) -> &str {
        "reference"
    }
}

impl BatchEvaluator for SurrogateModel {
    fn evaluate_batch(&self, inputs: &[DeviceInputs], out: &mut Vec<f64>) -> Result<()> {
        self.predict_into(inputs, out)
    }

    fn label(&self) -> &str {
        "surrogate"
    }
}

/// One timing measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchTiming {
    /// Aggregated batch runtime `[s]`.
    pub seconds: f64,
    /// Every measured run `[s]`, in execution order.
    pub samples: Vec<f64>,
    /// Bit-level FNV-1a checksum of the outputs, identical across runs.
    pub checksum: u64,
    /// Set when the runtime is too close to the clock granularity to trust.
    pub unreliable: bool,
    /// Outputs of the final measured run, in row order.
    #[serde(skip)]
    pub outputs: Vec<f64>,
}

fn checksum_bits(values: &[f64]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for v in values {
        for byte in v.to_bits().to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x100000001b3);
        }
    }
    hash
}

/// Smallest positive delta the monotonic clock resolves, estimated once.
fn clock_granularity() -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..64 {
        let t0 = Instant::now();
        let mut t1 = Instant::now();
        while t1 == t0 {
            t1 = Instant::now();
        }
        best = best.min((t1 - t0).as_secs_f64());
    }
    best
}

/// Times whole-batch evaluation of `evaluator` over the dataset inputs.
///
/// Runs `warmup_runs` untimed passes, then `measured_runs` timed passes, and
/// aggregates the samples per the configuration. All passes must produce
/// bit-identical outputs; drift is reported as a measurement error.
pub fn time_batch(
    evaluator: &dyn BatchEvaluator,
    dataset: &Dataset,
    config: &BenchConfig,
) -> Result<BatchTiming> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::Config("cannot time an empty dataset".into()));
    }
    let inputs = &dataset.inputs;
    let mut out: Vec<f64> = Vec::with_capacity(inputs.len());
    let mut reference_checksum = None;

    for _ in 0..config.warmup_runs {
        out.clear();
        evaluator.evaluate_batch(inputs, &mut out)?;
        reference_checksum = Some(checksum_bits(&out));
    }

    let mut samples = Vec::with_capacity(config.measured_runs);
    for _ in 0..config.measured_runs {
        out.clear();
        let start = Instant::now();
        evaluator.evaluate_batch(inputs, &mut out)?;
        let elapsed = start.elapsed().as_secs_f64();
        std::hint::black_box(&out);
        samples.push(elapsed);

        let sum = checksum_bits(&out);
        match reference_checksum {
            None => reference_checksum = Some(sum),
            Some(expected) if expected != sum => {
                return Err(Error::Measurement(format!(
                    "output checksum drifted across runs of the {} evaluator",
                    evaluator.label()
                )));
            }
            _ => {}
        }
    }

    let seconds = config.aggregation.apply(&samples);
    if seconds.is_nan() || seconds <= 0.0 {
        return Err(Error::Measurement(format!(
            "aggregated runtime {seconds} s is not positive"
        )));
    }
    let unreliable = seconds < 100.0 * clock_granularity();
    Ok(BatchTiming {
        seconds,
        samples,
        checksum: reference_checksum.unwrap_or(0),
        unreliable,
        outputs: out,
    })
}

/// Order-preserving parallel batch evaluation over scoped threads. Intended
/// for throughput exploration only; speed-up measurements use the
/// single-threaded [`time_batch`].
pub fn evaluate_batch_parallel<E>(
    evaluator: &E,
    inputs: &[DeviceInputs],
    threads: usize,
) -> Result<Vec<f64>>
where
    E: BatchEvaluator + Sync,
{
    let threads = threads.max(1).min(inputs.len().max(1));
    let chunk = inputs.len().div_ceil(threads);
    let mut results: Vec<Result<Vec<f64>>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = inputs
            .chunks(chunk)
            .map(|slice| {
                scope.spawn(move || {
                    let mut out = Vec::with_capacity(slice.len());
                    evaluator.evaluate_batch(slice, &mut out).map(|()| out)
                })
            })
            .collect();
        for h in handles {
            results.push(h.join().expect("evaluator thread panicked"));
        }
    });
    let mut merged = Vec::with_capacity(inputs.len());
    for r in results {
        merged.extend(r?);
    }
    Ok(merged)
}

/// One row of the runtime comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSummary {
    pub name: String,
    pub nmse_percent: f64,
    /// Surrogate batch runtime `[s]`.
    pub rt_pred: f64,
    /// Reference batch runtime `[s]`.
    pub rt_ref: f64,
    pub sur: f64,
}

/// Column-wise mean row. The mean SUR is the arithmetic mean of the
/// per-signal SURs, not the ratio of mean runtimes.
pub fn mean_summary(rows: &[SignalSummary]) -> Option<SignalSummary> {
    if rows.is_empty() {
        return None;
    }
    let n = rows.len() as f64;
    Some(SignalSummary {
        name: "mean".into(),
        nmse_percent: rows.iter().map(|r| r.nmse_percent).sum::<f64>() / n,
        rt_pred: rows.iter().map(|r| r.rt_pred).sum::<f64>() / n,
        rt_ref: rows.iter().map(|r| r.rt_ref).sum::<f64>() / n,
        sur: rows.iter().map(|r| r.sur).sum::<f64>() / n,
    })
}

/// Plain-text comparison table: one row per signal plus a mean row.
pub fn format_summary_table(rows: &[SignalSummary]) -> String {
    let mut text = String::new();
    text.push_str(&format!(
        "{:<14} {:>12} {:>14} {:>14} {:>10}\n",
        "signal", "NMSE%", "RT_P (s)", "RT_ref (s)", "SUR"
    ));
    let mut print_row = |r: &SignalSummary| {
        text.push_str(&format!(
            "{:<14} {:>12.6} {:>14.6e} {:>14.6e} {:>10.2}\n",
            r.name, r.nmse_percent, r.rt_pred, r.rt_ref, r.sur
        ));
    };
    for r in rows {
        print_row(r);
    }
    if let Some(mean) = mean_summary(rows) {
        print_row(&mean);
        let ratio_of_means = mean.rt_ref / mean.rt_pred;
        text.push_str(&format!(
            "note: mean-row SUR is the mean of per-signal SURs; the ratio of mean runtimes is {ratio_of_means:.2}\n"
        ));
    }
    text
}
