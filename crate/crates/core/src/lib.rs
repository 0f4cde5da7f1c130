//! Fast polynomial surrogates for an analytical threshold-voltage model of
//! junctionless double-gate MOSFETs.
//!
//! The analytical reference ([`oracle`]) resolves drain-induced barrier
//! lowering through an implicit per-region solve, which makes it expensive to
//! sweep. This crate fits a multilinear polynomial replacement to reference
//! labels with Gram-Schmidt orthogonal least squares ([`solver`]) and
//! quantifies how faithful and how much faster the replacement is
//! ([`metrics`], [`mod@bench`]).
//!
//! Pipeline: generate datasets ([`signal`]), expand inputs into the
//! regressor matrix ([`regressors`]), fit, then evaluate accuracy (NMSE%,
//! threshold-difference statistics) and the runtime speed-up ratio against
//! the reference on identical data. Datasets travel as CSV and fitted models
//! as JSON ([`io`]).

pub mod bench;
pub mod error;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod regressors;
pub mod signal;
pub mod solver;

pub use bench::{
    format_summary_table, mean_summary, time_batch, Aggregation, BatchEvaluator, BatchTiming,
    BenchConfig, SignalSummary,
};
pub use error::{Error, Result};
pub use metrics::{
    dvt_stats, nmse_percent, nmse_percent_normalized, speedup_ratio, DvtStats, EvalReport,
    Histogram, NmseNormalization, TimingReport,
};
pub use oracle::{
    threshold_voltage, vt0, vti, BarrierForm, BarrierSpec, DeviceInputs, OracleParams, Region,
    INPUT_COUNT, INPUT_NAMES,
};
pub use regressors::{
    build_regressor_matrix, design_row, eval_expansion, monomial_basis, InputScaler, MonomialBasis,
    RegressorMatrix,
};
pub use signal::{
    label_with_oracle, random_training_set, test_sequence, Dataset, Interval, ParameterRanges,
    WaveformKind,
};
pub use solver::{
    back_substitute, fit, gram_schmidt_decompose, normal_equation_solve, project_output, FitReport,
    GramSchmidtMode, OrthoDecomposition, SurrogateModel,
};
