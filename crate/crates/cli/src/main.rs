//! Command-line driver for the threshold-voltage surrogate workflow:
//! generate datasets, fit the polynomial model, evaluate its accuracy,
//! benchmark the speed-up over the analytical reference, and run batch
//! predictions.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;

/// Exit codes: 2 configuration, 3 data, 4 numerical, 5 I/O.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<vtfit_core::Error> for CliError {
    fn from(err: vtfit_core::Error) -> Self {
        let message = err.to_string();
        classify(&err).with_message(message)
    }
}

/// Maps core error kinds onto exit-code categories; row-wrapped errors
/// classify by their cause.
fn classify(err: &vtfit_core::Error) -> CliError {
    use vtfit_core::Error::*;
    match err {
        Config(_) => CliError::Config(String::new()),
        Data(_) | Csv(_) | Json(_) => CliError::Data(String::new()),
        Io(_) => CliError::Io(String::new()),
        AtRow { source, .. } => classify(source),
        _ => CliError::Numerical(String::new()),
    }
}

impl CliError {
    fn with_message(self, msg: String) -> Self {
        match self {
            CliError::Config(_) => CliError::Config(msg),
            CliError::Data(_) => CliError::Data(msg),
            CliError::Numerical(_) => CliError::Numerical(msg),
            CliError::Io(_) => CliError::Io(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "vtfit",
    version,
    about = "Fit and evaluate fast polynomial surrogates of an analytical \
             JL-DG-MOSFET threshold-voltage model"
)]
struct Cli {
    /// Experiment configuration file (JSON); defaults apply when omitted
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override the configured training seed
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Override the configured output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Print the fully populated default configuration and exit
    #[arg(long)]
    print_default_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the labeled training CSV and every configured test CSV
    Gen,
    /// Fit the surrogate on a labeled training CSV and write the model JSON
    Fit {
        /// Training CSV (default: train.csv in the output directory)
        #[arg(long, value_name = "PATH")]
        train: Option<PathBuf>,
        /// Model output path (default: model.json in the output directory)
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
    },
    /// Evaluate a model on a labeled test CSV (accuracy report + histogram)
    Eval {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// Labeled test CSV
        #[arg(long, value_name = "PATH")]
        test: PathBuf,
        /// Report JSON path (default: eval_(test stem).json in the output directory)
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        /// Histogram CSV path (default: dvt_hist_(test stem).csv in the output directory)
        #[arg(long, value_name = "PATH")]
        histogram: Option<PathBuf>,
    },
    /// Time reference vs surrogate on identical datasets and report SUR
    Bench {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// Test CSVs; when omitted the configured signals are generated at
        /// the benchmark size
        #[arg(long = "test", value_name = "PATH")]
        tests: Vec<PathBuf>,
        /// Report JSON path (default: bench.json in the output directory)
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        /// Table text path (default: bench_table.txt in the output directory)
        #[arg(long, value_name = "PATH")]
        table: Option<PathBuf>,
    },
    /// Predict threshold voltages for an inputs CSV
    Predict {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// Inputs CSV; a VT column, if present, is ignored
        #[arg(long, value_name = "PATH")]
        inputs: PathBuf,
        /// Predictions CSV path (default: predictions.csv in the output directory)
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.print_default_config {
        print!("{}", ExperimentConfig::default_json());
        return Ok(());
    }
    let mut config = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config.training.seed = seed;
    }
    let out_dir = cli.out.unwrap_or_else(|| config.output_dir.clone());

    let Some(command) = cli.command else {
        return Err(CliError::Config(
            "no command given; see `vtfit --help`".into(),
        ));
    };
    match command {
        Command::Gen => commands::cmd_gen(&config, &out_dir),
        Command::Fit { train, model } => commands::cmd_fit(&config, &out_dir, train, model),
        Command::Eval {
            model,
            test,
            report,
            histogram,
        } => commands::cmd_eval(&config, &out_dir, model, test, report, histogram),
        Command::Bench {
            model,
            tests,
            report,
            table,
        } => commands::cmd_bench(&config, &out_dir, model, tests, report, table),
        Command::Predict {
            model,
            inputs,
            output,
        } => commands::cmd_predict(&out_dir, model, inputs, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
