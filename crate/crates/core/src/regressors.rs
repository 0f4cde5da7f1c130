//! Multilinear monomial basis and regressor matrix construction.
//!
//! The basis consists of every product of distinct inputs: all `2^m - 1`
//! non-empty subsets of the `m` inputs, ordered by subset size and then
//! lexicographically (`u1, u2, ..., um, u1*u2, u1*u3, ..., u1*u2*...*um`).
//! An optional leading all-ones column carries the constant term and is
//! counted separately from the monomial count.
//!
//! Row construction shares sub-products: the value of a size-k subset is the
//! size-(k-1) prefix product times one more input, so a full row costs one
//! multiply per column. `eval_expansion` and `build_regressor_matrix` use the
//! same routine, which makes the two paths agree bit-for-bit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::DeviceInputs;
use crate::signal::{Dataset, ParameterRanges};

/// Largest supported input count (`2^m - 1` columns must stay practical).
pub const MAX_INPUTS: usize = 20;

/// Ordered multilinear monomial basis over `m` inputs.
///
/// Each term is a bitmask over the inputs; bit `i` selects input `i` (0-based
/// in canonical input order). The ordering is part of the model identity:
/// fitted coefficients are bound to these columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialBasis {
    m: usize,
    include_bias: bool,
    terms: Vec<u32>,
}

impl MonomialBasis {
    pub fn input_count(&self) -> usize {
        self.m
    }

    pub fn include_bias(&self) -> bool {
        self.include_bias
    }

    /// Monomial bitmasks in canonical column order (bias column excluded).
    pub fn terms(&self) -> &[u32] {
        &self.terms
    }

    /// Number of monomial terms, `2^m - 1`.
    pub fn monomial_count(&self) -> usize {
        self.terms.len()
    }

    /// Total column count including the bias column when present.
    pub fn column_count(&self) -> usize {
        self.terms.len() + usize::from(self.include_bias)
    }

    /// Rebuilds a basis from serialized parts, checking canonical ordering.
    pub fn from_parts(m: usize, include_bias: bool, terms: Vec<u32>) -> Result<Self> {
        let canonical = monomial_basis(m, include_bias)?;
        if terms != canonical.terms {
            return Err(Error::Data(
                "monomial terms are not in canonical order".into(),
            ));
        }
        Ok(canonical)
    }
}

/// Per-input affine map `x -> (x - offset) * gain`, used to bring raw inputs
/// onto [-1, 1] before forming products. Stored with the fitted model and
/// applied identically at prediction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputScaler {
    offsets: Vec<f64>,
    gains: Vec<f64>,
}

impl InputScaler {
    /// Maps each input interval onto [-1, 1]; degenerate intervals map their
    /// single point to 0 with unit gain.
    pub fn from_ranges(ranges: &ParameterRanges) -> Self {
        let intervals = ranges.as_array();
        let offsets = intervals.iter().map(|iv| iv.midpoint()).collect();
        let gains = intervals
            .iter()
            .map(|iv| {
                let half = 0.5 * iv.width();
                if half > 0.0 {
                    1.0 / half
                } else {
                    1.0
                }
            })
            .collect();
        Self { offsets, gains }
    }

    pub fn from_parts(offsets: Vec<f64>, gains: Vec<f64>) -> Result<Self> {
        if offsets.len() != gains.len() {
            return Err(Error::Dimension(format!(
                "scaler has {} offsets but {} gains",
                offsets.len(),
                gains.len()
            )));
        }
        if gains.iter().any(|g| *g == 0.0 || !g.is_finite())
            || offsets.iter().any(|o| !o.is_finite())
        {
            return Err(Error::Config(
                "scaler gains must be finite and non-zero, offsets finite".into(),
            ));
        }
        Ok(Self { offsets, gains })
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn scale(&self, i: usize, x: f64) -> f64 {
        (x - self.offsets[i]) * self.gains[i]
    }

    pub fn unscale(&self, i: usize, y: f64) -> f64 {
        y / self.gains[i] + self.offsets[i]
    }
}

/// Dense design matrix: one row per dataset row, one column per basis column.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorMatrix {
    pub values: DMatrix<f64>,
}

impl RegressorMatrix {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }
}

/// Builds the canonical basis over `m` inputs. `1 <= m <= 20`.
pub fn monomial_basis(m: usize, include_bias: bool) -> Result<MonomialBasis> {
    if !(1..=MAX_INPUTS).contains(&m) {
        return Err(Error::Config(format!(
            "input count must be in 1..={MAX_INPUTS}, got {m}"
        )));
    }
    let mut terms = Vec::with_capacity((1usize << m) - 1);
    for size in 1..=m {
        // combinations of `size` indices in lexicographic order
        let mut idx: Vec<usize> = (0..size).collect();
        'combos: loop {
            let mask = idx.iter().fold(0u32, |acc, i| acc | (1 << i));
            terms.push(mask);
            // rightmost index that can still advance
            let mut j = size;
            loop {
                if j == 0 {
                    break 'combos;
                }
                j -= 1;
                if idx[j] < m - size + j {
                    break;
                }
            }
            idx[j] += 1;
            for k in j + 1..size {
                idx[k] = idx[k - 1] + 1;
            }
        }
    }
    debug_assert_eq!(terms.len(), (1usize << m) - 1);
    Ok(MonomialBasis {
        m,
        include_bias,
        terms,
    })
}

/// Scratch buffers for repeated row construction.
pub(crate) struct RowWorkspace {
    scaled: Vec<f64>,
    products: Vec<f64>,
}

impl RowWorkspace {
    pub(crate) fn new(m: usize) -> Self {
        let mut products = vec![0.0; 1usize << m];
        products[0] = 1.0;
        Self {
            scaled: vec![0.0; m],
            products,
        }
    }

    /// Fills one design row for raw inputs `u`, applying the scaler when
    /// present. `out` must have the basis column count.
    pub(crate) fn fill_row(
        &mut self,
        u: &[f64],
        basis: &MonomialBasis,
        scaler: Option<&InputScaler>,
        out: &mut [f64],
    ) -> Result<()> {
        let m = basis.m;
        if u.len() != m {
            return Err(Error::Dimension(format!(
                "row has {} inputs but the basis expects {m}",
                u.len()
            )));
        }
        if let Some(s) = scaler {
            if s.len() != m {
                return Err(Error::Dimension(format!(
                    "scaler covers {} inputs but the basis expects {m}",
                    s.len()
                )));
            }
        }
        debug_assert_eq!(out.len(), basis.column_count());
        for (i, &x) in u.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::Domain(format!("non-finite input {x} at column {i}")));
            }
            self.scaled[i] = match scaler {
                Some(s) => s.scale(i, x),
                None => x,
            };
        }
        let mut col = 0;
        if basis.include_bias {
            out[0] = 1.0;
            col = 1;
        }
        for &t in &basis.terms {
            let hi = 31 - t.leading_zeros() as usize;
            let parent = (t & !(1u32 << hi)) as usize;
            let value = self.products[parent] * self.scaled[hi];
            self.products[t as usize] = value;
            out[col] = value;
            col += 1;
        }
        Ok(())
    }
}

/// One design row for an arbitrary-arity raw input row.
pub fn design_row(
    u: &[f64],
    basis: &MonomialBasis,
    scaler: Option<&InputScaler>,
) -> Result<Vec<f64>> {
    let mut ws = RowWorkspace::new(basis.m);
    let mut out = vec![0.0; basis.column_count()];
    ws.fill_row(u, basis, scaler, &mut out)?;
    Ok(out)
}

/// Builds the regressor matrix for a dataset. Row `k` of the result
/// corresponds to dataset row `k`; columns follow the basis order.
pub fn build_regressor_matrix(
    dataset: &Dataset,
    basis: &MonomialBasis,
    scaler: Option<&InputScaler>,
) -> Result<RegressorMatrix> {
    dataset.validate()?;
    let n = dataset.len();
    let cols = basis.column_count();
    let mut values = DMatrix::zeros(n, cols);
    let mut ws = RowWorkspace::new(basis.m);
    let mut row = vec![0.0; cols];
    for (k, inputs) in dataset.inputs.iter().enumerate() {
        ws.fill_row(&inputs.as_array(), basis, scaler, &mut row)
            .map_err(|e| e.at_row(k))?;
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite regressor entry at row {k}, column {j}"
                )));
            }
            values[(k, j)] = *v;
        }
    }
    Ok(RegressorMatrix { values })
}

/// Evaluates the polynomial expansion `theta . [bias, monomials(row)]`.
pub fn eval_expansion(
    row: &DeviceInputs,
    basis: &MonomialBasis,
    theta: &[f64],
    scaler: Option<&InputScaler>,
) -> Result<f64> {
    if theta.len() != basis.column_count() {
        return Err(Error::Dimension(format!(
            "theta has {} entries but the basis has {} columns",
            theta.len(),
            basis.column_count()
        )));
    }
    let design = design_row(&row.as_array(), basis, scaler)?;
    Ok(design.iter().zip(theta).map(|(p, t)| p * t).sum())
}
