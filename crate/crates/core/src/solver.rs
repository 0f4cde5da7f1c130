//! Least-squares fitting of the polynomial surrogate.
//!
//! Two routes solve the same problem `min ||z - P*theta||`:
//!
//! * the orthogonal-decomposition path: `P = W*A` by Gram-Schmidt with `W`
//!   column-orthogonal and `A` unit upper-triangular, then
//!   `g_i = <w_i, z>/<w_i, w_i>` and a triangular back-substitution
//!   `A*theta = g`. No general matrix is ever inverted.
//! * the normal-equation baseline `P^T P theta = P^T z`, kept as the
//!   correctness oracle for the decomposition path.
//!
//! Classical mode forms every projection coefficient against the original
//! column; modified mode projects against the running residual, which keeps
//! orthogonality near machine precision on ill-conditioned inputs. Both are
//! exposed; modified is the default.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::DeviceInputs;
use crate::regressors::{
    build_regressor_matrix, eval_expansion, InputScaler, MonomialBasis, RegressorMatrix,
    RowWorkspace,
};
use crate::signal::Dataset;

/// A column is declared dependent when its orthogonalized squared norm falls
/// below this fraction of the original column's squared norm.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Relative Frobenius bound on `||P - W*A||` honoured by both modes.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Normalized off-diagonal `|<w_i, w_j>|` bound, modified mode.
pub const ORTHOGONALITY_TOL_MODIFIED: f64 = 1e-8;

/// Normalized off-diagonal bound for classical mode, which loses
/// orthogonality in finite precision.
pub const ORTHOGONALITY_TOL_CLASSICAL: f64 = 1e-6;

/// Gram-Schmidt variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramSchmidtMode {
    /// Projection coefficients taken against the original column.
    Classical,
    /// Projections applied sequentially against the updated residual.
    Modified,
}

impl GramSchmidtMode {
    fn tag(self) -> &'static str {
        match self {
            GramSchmidtMode::Classical => "gram-schmidt-classical",
            GramSchmidtMode::Modified => "gram-schmidt-modified",
        }
    }
}

/// The `P = W*A` factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoDecomposition {
    /// Column-orthogonal factor, same shape as `P`.
    pub w: DMatrix<f64>,
    /// Unit upper-triangular projection coefficients.
    pub a: DMatrix<f64>,
    /// Diagonal of `W^T W`: squared column norms of `W`.
    pub d: DVector<f64>,
}

/// Fit diagnostics carried by a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitReport {
    /// Euclidean norm of the training residual `z - P*theta`.
    pub residual_norm: f64,
    /// `min(D) / max(D)`: crude conditioning indicator of the decomposition.
    pub condition_indicator: f64,
    /// Which solver produced the coefficients.
    pub solver_path: String,
    /// Provenance tag of the training dataset.
    pub training_provenance: String,
}

/// A fitted surrogate: coefficients bound to a basis and input scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateModel {
    pub theta: Vec<f64>,
    pub basis: MonomialBasis,
    pub scaler: Option<InputScaler>,
    pub fit_report: FitReport,
}

impl SurrogateModel {
    /// Predicted threshold voltage `[V]` for one input row.
    pub fn predict(&self, row: &DeviceInputs) -> Result<f64> {
        eval_expansion(row, &self.basis, &self.theta, self.scaler.as_ref())
    }

    /// Batch prediction in row order, appending into `out`.
    pub fn predict_into(&self, inputs: &[DeviceInputs], out: &mut Vec<f64>) -> Result<()> {
        let cols = self.basis.column_count();
        if self.theta.len() != cols {
            return Err(Error::Dimension(format!(
                "theta has {} entries but the basis has {cols} columns",
                self.theta.len()
            )));
        }
        out.reserve(inputs.len());
        let mut ws = RowWorkspace::new(self.basis.input_count());
        let mut row = vec![0.0; cols];
        for (k, inputs_k) in inputs.iter().enumerate() {
            ws.fill_row(
                &inputs_k.as_array(),
                &self.basis,
                self.scaler.as_ref(),
                &mut row,
            )
            .map_err(|e| e.at_row(k))?;
            let y: f64 = row.iter().zip(&self.theta).map(|(p, t)| p * t).sum();
            out.push(y);
        }
        Ok(())
    }

    /// Batch prediction returning a fresh vector.
    pub fn predict_batch(&self, inputs: &[DeviceInputs]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(inputs.len());
        self.predict_into(inputs, &mut out)?;
        Ok(out)
    }
}

/// Factors `P = W*A` by Gram-Schmidt.
///
/// Requires at least as many rows as columns. A column whose orthogonalized
/// squared norm falls below [`DEGENERACY_THRESHOLD`] times its original
/// squared norm aborts with a singularity error naming that column.
pub fn gram_schmidt_decompose(
    p: &RegressorMatrix,
    mode: GramSchmidtMode,
) -> Result<OrthoDecomposition> {
    let n = p.nrows();
    let m = p.ncols();
    if m == 0 || n < m {
        return Err(Error::Dimension(format!(
            "decomposition needs rows >= columns >= 1, got {n} x {m}"
        )));
    }
    let mut w = DMatrix::zeros(n, m);
    let mut a = DMatrix::<f64>::identity(m, m);
    let mut d = DVector::zeros(m);

    for r in 0..m {
        let p_r = p.values.column(r);
        let p_r_sq = p_r.norm_squared();
        let mut v = p_r.clone_owned();
        match mode {
            GramSchmidtMode::Classical => {
                for i in 0..r {
                    a[(i, r)] = w.column(i).dot(&p_r) / d[i];
                }
                for i in 0..r {
                    v.axpy(-a[(i, r)], &w.column(i), 1.0);
                }
            }
            GramSchmidtMode::Modified => {
                for i in 0..r {
                    let sigma = w.column(i).dot(&v) / d[i];
                    a[(i, r)] = sigma;
                    v.axpy(-sigma, &w.column(i), 1.0);
                }
            }
        }
        let w_r_sq = v.norm_squared();
        if w_r_sq.is_nan() || w_r_sq <= DEGENERACY_THRESHOLD * p_r_sq {
            return Err(Error::SingularColumn { column: r });
        }
        w.set_column(r, &v);
        d[r] = w_r_sq;
    }
    Ok(OrthoDecomposition { w, a, d })
}

/// Projects the output vector onto the orthogonal columns:
/// `g_i = <w_i, z> / D_i`.
pub fn project_output(decomp: &OrthoDecomposition, z: &DVector<f64>) -> Result<DVector<f64>> {
    if z.len() != decomp.w.nrows() {
        return Err(Error::Dimension(format!(
            "output vector has {} entries, expected {}",
            z.len(),
            decomp.w.nrows()
        )));
    }
    let d_max = decomp.d.max();
    let mut g = DVector::zeros(decomp.d.len());
    for i in 0..decomp.d.len() {
        let d_i = decomp.d[i];
        if d_i.is_nan() || d_i <= DEGENERACY_THRESHOLD * d_max {
            return Err(Error::SingularColumn { column: i });
        }
        g[i] = decomp.w.column(i).dot(z) / d_i;
    }
    Ok(g)
}

/// Solves `A*theta = g` for unit upper-triangular `A` by backward
/// substitution; no inverse is formed.
pub fn back_substitute(a: &DMatrix<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
    let m = g.len();
    if a.nrows() != m || a.ncols() != m {
        return Err(Error::Dimension(format!(
            "triangular factor is {}x{}, expected {m}x{m}",
            a.nrows(),
            a.ncols()
        )));
    }
    for i in 0..m {
        if (a[(i, i)] - 1.0).abs() > f64::EPSILON {
            return Err(Error::Dimension(format!(
                "triangular factor diagonal entry {i} is {}, expected 1",
                a[(i, i)]
            )));
        }
    }
    let mut theta = DVector::zeros(m);
    for i in (0..m).rev() {
        let mut acc = g[i];
        for j in i + 1..m {
            acc -= a[(i, j)] * theta[j];
        }
        theta[i] = acc;
    }
    Ok(theta)
}

/// Baseline solve of the normal equations `P^T P theta = P^T z`.
///
/// Uses a Cholesky factorization of the Gram matrix, falling back to LU;
/// a factorization failure is reported as a singular system.
pub fn normal_equation_solve(p: &RegressorMatrix, z: &DVector<f64>) -> Result<DVector<f64>> {
    if z.len() != p.nrows() {
        return Err(Error::Dimension(format!(
            "output vector has {} entries, expected {}",
            z.len(),
            p.nrows()
        )));
    }
    let pt = p.values.transpose();
    let gram = &pt * &p.values;
    let rhs = &pt * z;
    let theta = match gram.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SingularSystem("P^T P is not invertible".into()))?,
    };
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::SingularSystem(
            "normal-equation solution is not finite".into(),
        ));
    }
    Ok(theta)
}

/// Fits a surrogate on a labeled dataset: regressor matrix, Gram-Schmidt
/// factorization, output projection, back-substitution.
pub fn fit(
    train: &Dataset,
    basis: &MonomialBasis,
    scaler: Option<&InputScaler>,
    mode: GramSchmidtMode,
) -> Result<SurrogateModel> {
    let outputs = train.outputs()?;
    let cols = basis.column_count();
    if train.len() < cols {
        return Err(Error::Dimension(format!(
            "{} training rows cannot determine {cols} coefficients",
            train.len()
        )));
    }
    let p = build_regressor_matrix(train, basis, scaler)?;
    let z = DVector::from_column_slice(outputs);
    let decomp = gram_schmidt_decompose(&p, mode)?;
    let g = project_output(&decomp, &z)?;
    let theta = back_substitute(&decomp.a, &g)?;
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::SingularSystem(
            "fitted coefficients are not finite".into(),
        ));
    }

    let residual_norm = (&p.values * &theta - &z).norm();
    let fit_report = FitReport {
        residual_norm,
        condition_indicator: decomp.d.min() / decomp.d.max(),
        solver_path: mode.tag().to_string(),
        training_provenance: train.provenance.clone(),
    };
    Ok(SurrogateModel {
        theta: theta.iter().copied().collect(),
        basis: basis.clone(),
        scaler: scaler.cloned(),
        fit_report,
    })
}
