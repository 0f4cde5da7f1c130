//! Shared fixtures for the criterion benchmarks.

use vtfit_core::{
    fit, label_with_oracle, monomial_basis, random_training_set, GramSchmidtMode, InputScaler,
    OracleParams, ParameterRanges, SurrogateModel,
};

/// Labeled training set of `n` rows over the default ranges.
pub fn training_set(n: usize, seed: u64) -> vtfit_core::Dataset {
    let ranges = ParameterRanges::default();
    let ds = random_training_set(&ranges, n, seed).expect("generation");
    label_with_oracle(&ds, &OracleParams::default()).expect("labeling")
}

/// Surrogate fitted on `n` training rows with the default configuration.
pub fn fitted_model(n: usize, seed: u64) -> SurrogateModel {
    let ranges = ParameterRanges::default();
    let basis = monomial_basis(6, true).expect("basis");
    let scaler = InputScaler::from_ranges(&ranges);
    fit(
        &training_set(n, seed),
        &basis,
        Some(&scaler),
        GramSchmidtMode::Modified,
    )
    .expect("fit")
}
