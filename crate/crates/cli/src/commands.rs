//! The five workflow commands: generate, fit, evaluate, benchmark, predict.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vtfit_core::{
    fit, io, label_with_oracle, monomial_basis, nmse_percent_normalized, random_training_set,
    speedup_ratio, test_sequence, time_batch, Dataset, EvalReport, InputScaler, MonomialBasis,
    SignalSummary, TimingReport,
};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Runtime comparison across test signals, serialized by `bench`.
#[derive(Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Column means; the SUR entry is the mean of per-signal SURs.
    pub mean: Option<SignalSummary>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub nmse_percent: f64,
    pub timing: TimingReport,
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn basis_and_scaler(
    config: &ExperimentConfig,
) -> Result<(MonomialBasis, Option<InputScaler>), CliError> {
    let basis = monomial_basis(vtfit_core::INPUT_COUNT, config.solver.include_bias)?;
    let scaler = config
        .solver
        .scale_inputs
        .then(|| InputScaler::from_ranges(&config.ranges));
    Ok((basis, scaler))
}

fn labeled_outputs(dataset: &Dataset) -> Result<&[f64], CliError> {
    dataset.outputs.as_deref().ok_or_else(|| {
        CliError::Data(format!(
            "dataset '{}' has no VT column; generate it with `gen` or label it first",
            dataset.provenance
        ))
    })
}

/// Generates the labeled training set and every configured test sequence.
pub fn cmd_gen(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    ensure_out_dir(out_dir)?;
    let train = random_training_set(&config.ranges, config.training.n, config.training.seed)?;
    let train = label_with_oracle(&train, &config.oracle)?;
    let train_path = out_dir.join("train.csv");
    io::write_dataset_csv(&train_path, &train)?;
    println!("wrote {} ({} rows)", train_path.display(), train.len());

    for signal in &config.test_signals {
        let ds = test_sequence(
            &signal.kind,
            signal.n,
            &config.ranges,
            config.sweep_points,
            config.training.seed,
        )?;
        let ds = label_with_oracle(&ds, &config.oracle)?;
        let path = out_dir.join(format!("{}.csv", signal.name));
        io::write_dataset_csv(&path, &ds)?;
        println!("wrote {} ({} rows)", path.display(), ds.len());
    }
    Ok(())
}

/// Fits the surrogate on a labeled training CSV and saves the model JSON.
pub fn cmd_fit(
    config: &ExperimentConfig,
    out_dir: &Path,
    train_path: Option<PathBuf>,
    model_path: Option<PathBuf>,
) -> Result<(), CliError> {
    ensure_out_dir(out_dir)?;
    let train_path = train_path.unwrap_or_else(|| out_dir.join("train.csv"));
    let model_path = model_path.unwrap_or_else(|| out_dir.join("model.json"));

    let train = io::read_dataset_csv(&train_path)?;
    labeled_outputs(&train)?;
    let (basis, scaler) = basis_and_scaler(config)?;
    let model = fit(&train, &basis, scaler.as_ref(), config.solver.mode)?;
    io::save_model(&model_path, &model)?;
    println!(
        "wrote {} ({}, residual norm {:.3e}, condition indicator {:.3e})",
        model_path.display(),
        model.fit_report.solver_path,
        model.fit_report.residual_norm,
        model.fit_report.condition_indicator
    );
    Ok(())
}

/// Evaluates a model against a labeled test CSV: accuracy report JSON plus
/// histogram CSV.
pub fn cmd_eval(
    config: &ExperimentConfig,
    out_dir: &Path,
    model_path: PathBuf,
    test_path: PathBuf,
    report_path: Option<PathBuf>,
    histogram_path: Option<PathBuf>,
) -> Result<(), CliError> {
    ensure_out_dir(out_dir)?;
    let model = io::load_model(&model_path)?;
    let test = io::read_dataset_csv(&test_path)?;
    let reference = labeled_outputs(&test)?;
    let predictions = model.predict_batch(&test.inputs)?;
    let report = EvalReport::compute(
        reference,
        &predictions,
        config.metrics.histogram_bins,
        config.metrics.nmse_normalization,
    )?;

    let stem = test_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "test".into());
    let report_path = report_path.unwrap_or_else(|| out_dir.join(format!("eval_{stem}.json")));
    let histogram_path =
        histogram_path.unwrap_or_else(|| out_dir.join(format!("dvt_hist_{stem}.csv")));
    io::write_json(&report_path, &report)?;
    io::write_histogram_csv(&histogram_path, &report.histogram)?;
    println!(
        "{stem}: NMSE% {:.6e}, |mu| {:.3e} V, sigma {:.3e} V over {} samples",
        report.nmse_percent, report.dvt_abs_mean, report.dvt_std, report.n
    );
    println!("wrote {}", report_path.display());
    println!("wrote {}", histogram_path.display());
    Ok(())
}

/// Times reference and surrogate over identical datasets and reports the
/// speed-up. With no test files, the configured signals are generated at the
/// benchmark size; reference outputs come from the timed reference runs.
pub fn cmd_bench(
    config: &ExperimentConfig,
    out_dir: &Path,
    model_path: PathBuf,
    test_paths: Vec<PathBuf>,
    report_path: Option<PathBuf>,
    table_path: Option<PathBuf>,
) -> Result<(), CliError> {
    ensure_out_dir(out_dir)?;
    let model = io::load_model(&model_path)?;

    let mut datasets: Vec<(String, Dataset)> = Vec::new();
    if test_paths.is_empty() {
        for signal in &config.test_signals {
            let ds = test_sequence(
                &signal.kind,
                config.bench.n,
                &config.ranges,
                config.sweep_points,
                config.training.seed,
            )?;
            datasets.push((signal.name.clone(), ds));
        }
    } else {
        for path in test_paths {
            let ds = io::read_dataset_csv(&path)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "test".into());
            datasets.push((name, ds));
        }
    }

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (name, ds) in &datasets {
        let t_ref = time_batch(&config.oracle, ds, &config.bench)?;
        let t_pred = time_batch(&model, ds, &config.bench)?;
        if t_ref.unreliable || t_pred.unreliable {
            eprintln!("warning: {name} runtimes are close to the clock granularity");
        }
        let nmse = nmse_percent_normalized(
            &t_ref.outputs,
            &t_pred.outputs,
            config.metrics.nmse_normalization,
        )?;
        let timing = speedup_ratio(
            t_ref.seconds,
            t_pred.seconds,
            config.bench.measured_runs,
            config.bench.warmup_runs,
            config.bench.aggregation,
        )?;
        summaries.push(SignalSummary {
            name: name.clone(),
            nmse_percent: nmse,
            rt_pred: timing.rt_pred,
            rt_ref: timing.rt_ref,
            sur: timing.sur,
        });
        rows.push(BenchRow {
            name: name.clone(),
            nmse_percent: nmse,
            timing,
        });
    }

    let table = vtfit_core::format_summary_table(&summaries);
    print!("{table}");
    let report = BenchReport {
        rows,
        mean: vtfit_core::mean_summary(&summaries),
    };
    let report_path = report_path.unwrap_or_else(|| out_dir.join("bench.json"));
    let table_path = table_path.unwrap_or_else(|| out_dir.join("bench_table.txt"));
    io::write_json(&report_path, &report)?;
    std::fs::write(&table_path, &table)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", table_path.display())))?;
    println!("wrote {}", report_path.display());
    println!("wrote {}", table_path.display());
    Ok(())
}

/// Predicts threshold voltages for an input CSV; any existing VT column is
/// ignored and replaced by the model's predictions.
pub fn cmd_predict(
    out_dir: &Path,
    model_path: PathBuf,
    inputs_path: PathBuf,
    output_path: Option<PathBuf>,
) -> Result<(), CliError> {
    ensure_out_dir(out_dir)?;
    let model = io::load_model(&model_path)?;
    let inputs = io::read_dataset_csv(&inputs_path)?;
    let predictions = model.predict_batch(&inputs.inputs)?;
    let labeled = Dataset {
        inputs: inputs.inputs,
        outputs: Some(predictions),
        provenance: inputs.provenance,
    };
    let output_path = output_path.unwrap_or_else(|| out_dir.join("predictions.csv"));
    io::write_dataset_csv(&output_path, &labeled)?;
    println!("wrote {} ({} rows)", output_path.display(), labeled.len());
    Ok(())
}
