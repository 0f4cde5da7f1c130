//! Fitting-path benchmarks: Gram-Schmidt variants against the
//! normal-equation baseline on the standard 64-column design.

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DVector;
use vtfit_bench::training_set;
use vtfit_core::{
    build_regressor_matrix, fit, gram_schmidt_decompose, monomial_basis, normal_equation_solve,
    GramSchmidtMode, InputScaler, ParameterRanges,
};

fn decomposition_benches(c: &mut Criterion) {
    let basis = monomial_basis(6, true).unwrap();
    let scaler = InputScaler::from_ranges(&ParameterRanges::default());
    let train = training_set(500, 7);
    let p = build_regressor_matrix(&train, &basis, Some(&scaler)).unwrap();
    let z = DVector::from_column_slice(train.outputs.as_ref().unwrap());

    c.bench_function("gram_schmidt_modified_500x64", |b| {
        b.iter(|| gram_schmidt_decompose(&p, GramSchmidtMode::Modified).unwrap())
    });
    c.bench_function("gram_schmidt_classical_500x64", |b| {
        b.iter(|| gram_schmidt_decompose(&p, GramSchmidtMode::Classical).unwrap())
    });
    c.bench_function("normal_equations_500x64", |b| {
        b.iter(|| normal_equation_solve(&p, &z).unwrap())
    });
}

fn fit_benches(c: &mut Criterion) {
    let basis = monomial_basis(6, true).unwrap();
    let scaler = InputScaler::from_ranges(&ParameterRanges::default());
    let train = training_set(2000, 11);
    c.bench_function("fit_end_to_end_2000x64", |b| {
        b.iter(|| fit(&train, &basis, Some(&scaler), GramSchmidtMode::Modified).unwrap())
    });
}

criterion_group!(benches, decomposition_benches, fit_benches);
criterion_main!(benches);
