//! Evaluation quantities: NMSE%, the threshold-difference signal and its
//! statistics, and the speed-up ratio between reference and surrogate
//! runtimes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominator convention for NMSE%.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NmseNormalization {
    /// Reference signal energy `sum(z_ref^2)` (default).
    #[default]
    Energy,
    /// Reference variance `sum((z_ref - mean)^2)`.
    Variance,
}

/// Normalized histogram over equal-width bins.
///
/// Bins are right-open except the last, which is right-closed, so every
/// sample lands in exactly one bin and the counts sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Histogram {
    /// Bin edges `[V]`, length `bins + 1`.
    pub edges: Vec<f64>,
    /// Normalized counts, length `bins`, summing to 1.
    pub counts: Vec<f64>,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    /// Bin centers, for plotting.
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Statistics of the difference signal `D = vt_ref - vt_pred`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DvtStats {
    /// Mean difference `[V]`.
    pub mean: f64,
    /// Absolute value of the mean `[V]`.
    pub abs_mean: f64,
    /// Sample standard deviation (n-1 denominator) `[V]`.
    pub std: f64,
    pub histogram: Histogram,
    pub n: usize,
}

/// Full accuracy report for one test signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub nmse_percent: f64,
    /// Mean of `D = vt_ref - vt_pred` `[V]`.
    pub dvt_mean: f64,
    /// `|mean(D)|` `[V]`.
    pub dvt_abs_mean: f64,
    /// Sample standard deviation of `D` `[V]`.
    pub dvt_std: f64,
    pub histogram: Histogram,
    pub n: usize,
}

impl EvalReport {
    /// Computes NMSE% and difference statistics in one pass.
    pub fn compute(
        vt_ref: &[f64],
        vt_pred: &[f64],
        bins: usize,
        normalization: NmseNormalization,
    ) -> Result<EvalReport> {
        let nmse = nmse_percent_normalized(vt_ref, vt_pred, normalization)?;
        let stats = dvt_stats(vt_ref, vt_pred, bins)?;
        Ok(EvalReport {
            nmse_percent: nmse,
            dvt_mean: stats.mean,
            dvt_abs_mean: stats.abs_mean,
            dvt_std: stats.std,
            histogram: stats.histogram,
            n: stats.n,
        })
    }
}

/// Batch runtimes of the reference and surrogate over one dataset, plus the
/// derived speed-up ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingReport {
    /// Reference-model batch runtime `[s]`.
    pub rt_ref: f64,
    /// Surrogate batch runtime `[s]`.
    pub rt_pred: f64,
    /// `rt_ref / rt_pred`.
    pub sur: f64,
    pub repetitions: usize,
    pub warmups: usize,
    pub aggregation: crate::bench::Aggregation,
}

fn check_pair(z_ref: &[f64], z_pred: &[f64]) -> Result<()> {
    if z_ref.len() != z_pred.len() {
        return Err(Error::Dimension(format!(
            "reference has {} samples, prediction {}",
            z_ref.len(),
            z_pred.len()
        )));
    }
    if z_ref.is_empty() {
        return Err(Error::Dimension("empty signals".into()));
    }
    Ok(())
}

/// Percentage normalized mean squared error under the energy convention:
/// `100 * sum((ref - pred)^2) / sum(ref^2)`.
pub fn nmse_percent(z_ref: &[f64], z_pred: &[f64]) -> Result<f64> {
    nmse_percent_normalized(z_ref, z_pred, NmseNormalization::Energy)
}

/// NMSE% with an explicit normalization convention.
pub fn nmse_percent_normalized(
    z_ref: &[f64],
    z_pred: &[f64],
    normalization: NmseNormalization,
) -> Result<f64> {
    check_pair(z_ref, z_pred)?;
    let sq_err: f64 = z_ref
        .iter()
        .zip(z_pred)
        .map(|(r, p)| (r - p) * (r - p))
        .sum();
    let denom = match normalization {
        NmseNormalization::Energy => z_ref.iter().map(|r| r * r).sum::<f64>(),
        NmseNormalization::Variance => {
            let mean = z_ref.iter().sum::<f64>() / z_ref.len() as f64;
            z_ref.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
        }
    };
    if denom <= 0.0 {
        return Err(Error::Domain(
            "NMSE normalization is zero for this reference signal".into(),
        ));
    }
    Ok(100.0 * sq_err / denom)
}

/// Mean, absolute mean, sample standard deviation and normalized histogram of
/// the difference signal `D(k) = vt_ref(k) - vt_pred(k)`.
pub fn dvt_stats(vt_ref: &[f64], vt_pred: &[f64], bins: usize) -> Result<DvtStats> {
    check_pair(vt_ref, vt_pred)?;
    let n = vt_ref.len();
    if n < 2 {
        return Err(Error::Dimension(
            "difference statistics need at least 2 samples".into(),
        ));
    }
    if bins < 1 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let d: Vec<f64> = vt_ref.iter().zip(vt_pred).map(|(r, p)| r - p).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;

    let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0.0; bins];
    let weight = 1.0 / n as f64;
    for &x in &d {
        let idx = if width > 0.0 {
            (((x - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += weight;
    }
    Ok(DvtStats {
        mean,
        abs_mean: mean.abs(),
        std: var.sqrt(),
        histogram: Histogram { edges, counts },
        n,
    })
}

/// Builds a [`TimingReport`] from measured batch runtimes.
pub fn speedup_ratio(
    rt_ref: f64,
    rt_pred: f64,
    repetitions: usize,
    warmups: usize,
    aggregation: crate::bench::Aggregation,
) -> Result<TimingReport> {
    if !rt_ref.is_finite() || !rt_pred.is_finite() || rt_ref <= 0.0 || rt_pred <= 0.0 {
        return Err(Error::Measurement(format!(
            "runtimes must be positive and finite, got rt_ref = {rt_ref}, rt_pred = {rt_pred}"
        )));
    }
    Ok(TimingReport {
        rt_ref,
        rt_pred,
        sur: rt_ref / rt_pred,
        repetitions,
        warmups,
        aggregation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Aggregation;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn nmse_zero_for_identical_signals() {
        let z = vec![0.3, -0.2, 0.7];
        assert_eq!(nmse_percent(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn nmse_hundred_for_zero_prediction() {
        let z = vec![0.5, -1.0, 2.0];
        assert_relative_eq!(
            nmse_percent(&z, &[0.0, 0.0, 0.0]).unwrap(),
            100.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn nmse_hand_example() {
        // 100 * (0.01 + 0.01) / 2 = 1.0
        let v = nmse_percent(&[1.0, 1.0], &[1.1, 0.9]).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn nmse_zero_reference_is_rejected() {
        assert!(matches!(
            nmse_percent(&[0.0, 0.0], &[1.0, 1.0]),
            Err(Error::Domain(_))
        ));
        // constant reference has zero variance
        assert!(
            nmse_percent_normalized(&[2.0, 2.0], &[1.0, 1.0], NmseNormalization::Variance).is_err()
        );
    }

    #[test]
    fn variance_normalization_differs_from_energy() {
        let z_ref = vec![10.0, 10.2, 9.8, 10.1];
        let z_pred = vec![10.1, 10.1, 9.9, 10.0];
        let energy = nmse_percent(&z_ref, &z_pred).unwrap();
        let var = nmse_percent_normalized(&z_ref, &z_pred, NmseNormalization::Variance).unwrap();
        assert!(var > energy);
    }

    #[test]
    fn dvt_identical_signals() {
        let z = vec![0.1, 0.2, 0.3, 0.4];
        let s = dvt_stats(&z, &z, 10).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.std, 0.0);
        assert_eq!(s.histogram.counts.iter().filter(|c| **c > 0.0).count(), 1);
        assert_relative_eq!(s.histogram.counts.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dvt_constant_shift() {
        let z_ref = vec![0.5, 0.6, 0.7];
        let z_pred: Vec<f64> = z_ref.iter().map(|v| v - 0.1).collect();
        let s = dvt_stats(&z_ref, &z_pred, 5).unwrap();
        assert_relative_eq!(s.mean, 0.1, max_relative = 1e-12);
        assert!(s.std <= 1e-15);
    }

    #[test]
    fn dvt_two_point_standard_deviation() {
        // D = (-1, 1): mean 0, sample std sqrt(2)
        let s = dvt_stats(&[-1.0, 1.0], &[0.0, 0.0], 2).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_relative_eq!(s.std, std::f64::consts::SQRT_2, max_relative = 1e-15);
        assert_eq!(s.abs_mean, 0.0);
    }

    #[test]
    fn dvt_length_mismatch() {
        assert!(dvt_stats(&[1.0, 2.0], &[1.0], 4).is_err());
        assert!(dvt_stats(&[1.0, 2.0], &[1.0, 2.0], 0).is_err());
        assert!(dvt_stats(&[1.0], &[1.0], 4).is_err());
    }

    #[test]
    fn speedup_equal_runtimes() {
        let t = speedup_ratio(0.5, 0.5, 11, 3, Aggregation::Median).unwrap();
        assert_eq!(t.sur, 1.0);
    }

    #[test]
    fn speedup_is_the_runtime_quotient() {
        // Quotient of the tabulated chirp runtimes, computed independently:
        // 0.0472 / 1.2704e-4 = 371.536523929471.
        let t = speedup_ratio(0.0472, 1.2704e-4, 1, 0, Aggregation::Median).unwrap();
        assert_eq!(t.sur, 0.0472 / 1.2704e-4);
        assert_relative_eq!(t.sur, 371.536523929471, max_relative = 1e-12);
        // Mean-runtime row: 0.0403 / 1.3127e-4 = 307.0008...
        let m = speedup_ratio(0.0403, 1.3127e-4, 1, 0, Aggregation::Median).unwrap();
        assert!((m.sur - 307.0).abs() < 0.01);
    }

    #[test]
    fn speedup_rejects_bad_measurements() {
        assert!(speedup_ratio(0.0, 1.0, 1, 0, Aggregation::Median).is_err());
        assert!(speedup_ratio(1.0, -2.0, 1, 0, Aggregation::Median).is_err());
    }

    proptest! {
        #[test]
        fn nmse_invariant_under_common_permutation(
            mut pairs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..40),
            rot in 0usize..40,
        ) {
            prop_assume!(pairs.iter().any(|(r, _)| r.abs() > 1e-6));
            let before: (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
            let a = nmse_percent(&before.0, &before.1).unwrap();
            let shift = rot % pairs.len();
            pairs.rotate_left(shift);
            let after: (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
            let b = nmse_percent(&after.0, &after.1).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn nmse_invariant_under_common_scaling(
            pairs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..40),
            alpha in prop_oneof![(-100.0f64..-0.01), (0.01f64..100.0)],
        ) {
            prop_assume!(pairs.iter().any(|(r, _)| r.abs() > 1e-6));
            let (zr, zp): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
            let a = nmse_percent(&zr, &zp).unwrap();
            let zr2: Vec<f64> = zr.iter().map(|v| alpha * v).collect();
            let zp2: Vec<f64> = zp.iter().map(|v| alpha * v).collect();
            let b = nmse_percent(&zr2, &zp2).unwrap();
            prop_assert!((a - b).abs() <= 1e-8 * a.max(1.0));
        }

        #[test]
        fn histogram_mass_is_one_and_samples_binned_once(
            d_ref in proptest::collection::vec(-2.0f64..2.0, 2..200),
            bins in 1usize..40,
        ) {
            let zeros = vec![0.0; d_ref.len()];
            let s = dvt_stats(&d_ref, &zeros, bins).unwrap();
            let mass: f64 = s.histogram.counts.iter().sum();
            prop_assert!((mass - 1.0).abs() <= 1e-12);
            // each sample falls in exactly one bin: total raw count equals n
            let raw: f64 = s.histogram.counts.iter().map(|c| c * s.n as f64).sum();
            prop_assert!((raw - s.n as f64).abs() <= 1e-9);
        }

        #[test]
        fn speedup_reciprocal_product_is_one(a in 1e-6f64..1e3, b in 1e-6f64..1e3) {
            let ab = speedup_ratio(a, b, 1, 0, Aggregation::Min).unwrap().sur;
            let ba = speedup_ratio(b, a, 1, 0, Aggregation::Min).unwrap().sur;
            prop_assert!((ab * ba - 1.0).abs() <= 4.0 * f64::EPSILON);
        }
    }
}
