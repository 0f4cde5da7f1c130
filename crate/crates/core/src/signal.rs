//! Training and testing dataset generation.
//!
//! Training data are uniform random draws over the configured parameter
//! ranges. Test data follow discrete chirp / sinusoidal / quasi-triangular
//! waveforms on the two voltage inputs while the four geometric inputs step
//! through a deterministic full-factorial grid, one grid point per equal
//! segment of the sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{threshold_voltage, DeviceInputs, OracleParams, INPUT_COUNT};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Config(format!("{name} interval must be finite")));
        }
        if self.lo > self.hi {
            return Err(Error::Config(format!(
                "{name} interval is empty: [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Affine map of `u` in `[0, 1]` onto the interval, clamped so rounding
    /// can never escape the closed interval.
    fn at(&self, u: f64) -> f64 {
        (self.lo + self.width() * u).clamp(self.lo, self.hi)
    }
}

/// Per-input sampling intervals, in canonical input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParameterRanges {
    /// Channel length `[nm]`.
    pub l: Interval,
    /// Damaged channel length `[nm]`.
    pub ld: Interval,
    /// Silicon thickness `[nm]`.
    pub tsi: Interval,
    /// Oxide thickness `[nm]`.
    pub tox: Interval,
    /// Central voltage `[V]`.
    pub vc: Interval,
    /// Drain voltage `[V]`.
    pub vd: Interval,
}

impl ParameterRanges {
    pub fn as_array(&self) -> [Interval; INPUT_COUNT] {
        [self.l, self.ld, self.tsi, self.tox, self.vc, self.vd]
    }

    /// Validates each interval and the geometric constraints. `ld.hi <= l.lo`
    /// is required so that independently sampled coordinates always satisfy
    /// `Ld <= L`.
    pub fn validate(&self) -> Result<()> {
        for (interval, name) in self
            .as_array()
            .iter()
            .zip(["L", "Ld", "tsi", "tox", "VC", "VD"])
        {
            interval.validate(name)?;
        }
        if self.l.lo <= 0.0 || self.tsi.lo <= 0.0 || self.tox.lo <= 0.0 {
            return Err(Error::Config(
                "geometric ranges L, tsi, tox must start above zero".into(),
            ));
        }
        if self.ld.lo < 0.0 {
            return Err(Error::Config("Ld range must start at or above zero".into()));
        }
        if self.ld.hi > self.l.lo {
            return Err(Error::Config(format!(
                "Ld range must not exceed the smallest L (Ld.hi = {} > L.lo = {})",
                self.ld.hi, self.l.lo
            )));
        }
        Ok(())
    }
}

impl Default for ParameterRanges {
    /// Default sweep box: `tox` 1..4 nm, `tsi` 5..15 nm, `L` 20..40 nm,
    /// `Ld` 0..20 nm, both voltages 0..1 V.
    fn default() -> Self {
        Self {
            l: Interval::new(20.0, 40.0),
            ld: Interval::new(0.0, 20.0),
            tsi: Interval::new(5.0, 15.0),
            tox: Interval::new(1.0, 4.0),
            vc: Interval::new(0.0, 1.0),
            vd: Interval::new(0.0, 1.0),
        }
    }
}

/// A set of input rows with optional reference outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<DeviceInputs>,
    /// Reference threshold voltages `[V]`, one per row, when labeled.
    pub outputs: Option<Vec<f64>>,
    /// Free-text origin tag, e.g. `random-train` or `chirp-test`.
    pub provenance: String,
}

impl Dataset {
    pub fn new(inputs: Vec<DeviceInputs>, provenance: impl Into<String>) -> Self {
        Self {
            inputs,
            outputs: None,
            provenance: provenance.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Data("dataset has no rows".into()));
        }
        if let Some(out) = &self.outputs {
            if out.len() != self.inputs.len() {
                return Err(Error::Dimension(format!(
                    "dataset has {} input rows but {} outputs",
                    self.inputs.len(),
                    out.len()
                )));
            }
            if let Some(k) = out.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!("non-finite output at row {k}")));
            }
        }
        for (k, row) in self.inputs.iter().enumerate() {
            row.validate().map_err(|e| e.at_row(k))?;
        }
        Ok(())
    }

    /// Reference outputs, or a data error naming the provenance.
    pub fn outputs(&self) -> Result<&[f64]> {
        self.outputs
            .as_deref()
            .ok_or_else(|| Error::Data(format!("dataset '{}' has no outputs", self.provenance)))
    }
}

/// Test waveform selector with per-kind parameters.
///
/// All frequencies are in cycles per full sequence; the triangle period is in
/// samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WaveformKind {
    /// Linear frequency sweep `sin(2*pi*(f0*k + (f1-f0)*k^2/(2n))/n)`.
    Chirp { f0: f64, f1: f64 },
    /// `sin(2*pi*f*k/n + phase)`.
    Sinusoidal { frequency: f64, phase: f64 },
    /// Periodic triangle wave ranging over [-1, 1].
    QTriangular { period: usize },
}

impl WaveformKind {
    pub fn label(&self) -> &'static str {
        match self {
            WaveformKind::Chirp { .. } => "chirp",
            WaveformKind::Sinusoidal { .. } => "sinusoidal",
            WaveformKind::QTriangular { .. } => "q-triangular",
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match *self {
            WaveformKind::Chirp { f0, f1 } => {
                if !(f0 >= 0.0 && f1 >= 0.0 && f0.is_finite() && f1.is_finite()) {
                    return Err(Error::Config(
                        "chirp frequencies must be finite and non-negative".into(),
                    ));
                }
                // mean frequency (f0+f1)/2 cycles over the sequence
                if f0 + f1 < 2.0 {
                    return Err(Error::Config(format!(
                        "chirp sweep {f0}..{f1} completes less than one cycle over the sequence"
                    )));
                }
            }
            WaveformKind::Sinusoidal { frequency, phase } => {
                if !frequency.is_finite() || !phase.is_finite() {
                    return Err(Error::Config("sinusoid parameters must be finite".into()));
                }
                if frequency < 1.0 {
                    return Err(Error::Config(format!(
                        "sinusoid frequency {frequency} completes less than one cycle over the sequence"
                    )));
                }
            }
            WaveformKind::QTriangular { period } => {
                if period < 2 {
                    return Err(Error::Config(format!(
                        "triangle period must be at least 2 samples, got {period}"
                    )));
                }
                if period > n {
                    return Err(Error::Config(format!(
                        "triangle period {period} exceeds sequence length {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Waveform value in [-1, 1] at sample `k` of `n`.
    fn sample(&self, k: usize, n: usize) -> f64 {
        let kf = k as f64;
        let nf = n as f64;
        match *self {
            WaveformKind::Chirp { f0, f1 } => {
                let phase = f0 * kf + (f1 - f0) * kf * kf / (2.0 * nf);
                (2.0 * std::f64::consts::PI * phase / nf).sin()
            }
            WaveformKind::Sinusoidal { frequency, phase } => {
                (2.0 * std::f64::consts::PI * frequency * kf / nf + phase).sin()
            }
            WaveformKind::QTriangular { period } => {
                let ph = (k % period) as f64 / period as f64;
                1.0 - 4.0 * (ph - 0.5).abs()
            }
        }
    }
}

/// Uniform random training rows; each coordinate independent uniform on its
/// interval, reproducible bit-for-bit from the seed.
pub fn random_training_set(ranges: &ParameterRanges, n: usize, seed: u64) -> Result<Dataset> {
    ranges.validate()?;
    if n < 1 {
        return Err(Error::Config("training size must be at least 1".into()));
    }
    let intervals = ranges.as_array();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut vals = [0.0; INPUT_COUNT];
        for (v, interval) in vals.iter_mut().zip(&intervals) {
            *v = interval.at(rng.random::<f64>());
        }
        inputs.push(DeviceInputs::from_array(vals));
    }
    Ok(Dataset::new(inputs, "random-train"))
}

/// Grid levels for one swept input: `points` evenly spaced values, or the
/// midpoint when a single level is requested or the interval is degenerate.
fn grid_levels(interval: Interval, points: usize) -> Vec<f64> {
    if points <= 1 || interval.width() == 0.0 {
        return vec![interval.midpoint()];
    }
    (0..points)
        .map(|i| interval.lo + interval.width() * i as f64 / (points - 1) as f64)
        .collect()
}

/// Deterministic test sequence.
///
/// `VC` and `VD` follow the waveform, affinely rescaled from [-1, 1] onto
/// their configured intervals. The geometric inputs (`L`, `Ld`, `tsi`, `tox`)
/// step through a full-factorial grid of `sweep_points` levels per input, the
/// sequence being split into one equal segment per grid combination (last
/// input varying fastest). Sequences are fully deterministic; `seed` is
/// accepted for interface uniformity with the random generator but does not
/// influence the output.
pub fn test_sequence(
    kind: &WaveformKind,
    n: usize,
    ranges: &ParameterRanges,
    sweep_points: usize,
    _seed: u64,
) -> Result<Dataset> {
    ranges.validate()?;
    if n < 2 {
        return Err(Error::Config(format!(
            "test sequence needs at least 2 samples, got {n}"
        )));
    }
    if sweep_points < 1 {
        return Err(Error::Config("sweep_points must be at least 1".into()));
    }
    kind.validate(n)?;

    let geo_levels: Vec<Vec<f64>> = [ranges.l, ranges.ld, ranges.tsi, ranges.tox]
        .into_iter()
        .map(|iv| grid_levels(iv, sweep_points))
        .collect();
    let combos: usize = geo_levels.iter().map(Vec::len).product();

    let mut inputs = Vec::with_capacity(n);
    for k in 0..n {
        let w = kind.sample(k, n);
        let u = 0.5 * (w + 1.0);
        let vc = ranges.vc.at(u);
        let vd = ranges.vd.at(u);

        // segment index -> mixed-radix digits over the geometric grid
        let mut combo = (k * combos / n).min(combos - 1);
        let mut geo = [0.0; 4];
        for j in (0..4).rev() {
            let levels = &geo_levels[j];
            geo[j] = levels[combo % levels.len()];
            combo /= levels.len();
        }
        inputs.push(DeviceInputs::new(geo[0], geo[1], geo[2], geo[3], vc, vd));
    }
    let ds = Dataset::new(inputs, format!("{}-test", kind.label()));
    ds.validate()?;
    Ok(ds)
}

/// Labels every row with the reference threshold voltage. Inputs are copied
/// unchanged; a failing row is reported with its index.
pub fn label_with_oracle(dataset: &Dataset, params: &OracleParams) -> Result<Dataset> {
    params.validate()?;
    dataset.validate()?;
    let mut outputs = Vec::with_capacity(dataset.len());
    for (k, row) in dataset.inputs.iter().enumerate() {
        let v = threshold_voltage(params, row).map_err(|e| e.at_row(k))?;
        outputs.push(v);
    }
    Ok(Dataset {
        inputs: dataset.inputs.clone(),
        outputs: Some(outputs),
        provenance: dataset.provenance.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{vt0, BarrierForm, BarrierSpec};
    use approx::assert_relative_eq;

    fn degenerate_ranges(point: &DeviceInputs) -> ParameterRanges {
        let a = point.as_array();
        ParameterRanges {
            l: Interval::new(a[0], a[0]),
            ld: Interval::new(a[1], a[1]),
            tsi: Interval::new(a[2], a[2]),
            tox: Interval::new(a[3], a[3]),
            vc: Interval::new(a[4], a[4]),
            vd: Interval::new(a[5], a[5]),
        }
    }

    #[test]
    fn degenerate_ranges_yield_identical_rows() {
        let point = DeviceInputs::new(25.0, 10.0, 8.0, 2.0, 0.3, 0.7);
        let ds = random_training_set(&degenerate_ranges(&point), 50, 3).unwrap();
        assert!(ds.inputs.iter().all(|r| *r == point));
    }

    #[test]
    fn same_seed_reproduces_dataset_exactly() {
        let ranges = ParameterRanges::default();
        let a = random_training_set(&ranges, 500, 99).unwrap();
        let b = random_training_set(&ranges, 500, 99).unwrap();
        assert_eq!(a, b);
        let c = random_training_set(&ranges, 500, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_sampling_statistics() {
        // Fixed seed; empirical bounds against the uniform-distribution
        // moments: support inside the interval, mean within 3 standard
        // errors of the midpoint.
        let ranges = ParameterRanges::default();
        let n = 10_000;
        let ds = random_training_set(&ranges, n, 2024).unwrap();
        for (j, interval) in ranges.as_array().iter().enumerate() {
            let col: Vec<f64> = ds.inputs.iter().map(|r| r.as_array()[j]).collect();
            let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(interval.contains(min) && interval.contains(max));
            let mean = col.iter().sum::<f64>() / n as f64;
            let se = interval.width() / (12.0 * n as f64).sqrt();
            assert!(
                (mean - interval.midpoint()).abs() <= 3.0 * se,
                "column {j}: mean {mean} vs midpoint {}",
                interval.midpoint()
            );
        }
    }

    #[test]
    fn empty_interval_is_rejected() {
        let ranges = ParameterRanges {
            tox: Interval::new(4.0, 1.0),
            ..Default::default()
        };
        assert!(matches!(
            random_training_set(&ranges, 10, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn overlapping_ld_range_is_rejected() {
        // Ld.hi exceeds L.lo = 20
        let ranges = ParameterRanges {
            ld: Interval::new(0.0, 30.0),
            ..Default::default()
        };
        assert!(ranges.validate().is_err());
    }

    #[test]
    fn zero_width_voltage_interval_gives_constant_sequence() {
        let ranges = ParameterRanges {
            vc: Interval::new(0.5, 0.5),
            vd: Interval::new(0.5, 0.5),
            ..Default::default()
        };
        let kind = WaveformKind::Sinusoidal {
            frequency: 4.0,
            phase: 0.0,
        };
        let ds = test_sequence(&kind, 64, &ranges, 1, 0).unwrap();
        assert!(ds.inputs.iter().all(|r| r.vc == 0.5 && r.vd == 0.5));
    }

    #[test]
    fn triangle_wave_is_periodic_under_constant_sweep() {
        let period = 16;
        let kind = WaveformKind::QTriangular { period };
        let ranges = ParameterRanges::default();
        let ds = test_sequence(&kind, 128, &ranges, 1, 0).unwrap();
        for k in 0..(128 - period) {
            assert_eq!(ds.inputs[k].vd, ds.inputs[k + period].vd);
            assert_eq!(ds.inputs[k].vc, ds.inputs[k + period].vc);
        }
    }

    #[test]
    fn chirp_with_equal_endpoints_reduces_to_sinusoid() {
        let n = 256;
        let f = 7.0;
        let ranges = ParameterRanges::default();
        let chirp = test_sequence(&WaveformKind::Chirp { f0: f, f1: f }, n, &ranges, 3, 0).unwrap();
        let sine = test_sequence(
            &WaveformKind::Sinusoidal {
                frequency: f,
                phase: 0.0,
            },
            n,
            &ranges,
            3,
            0,
        )
        .unwrap();
        for (a, b) in chirp.inputs.iter().zip(&sine.inputs) {
            assert_relative_eq!(a.vd, b.vd, max_relative = 1e-13, epsilon = 1e-13);
            assert_relative_eq!(a.vc, b.vc, max_relative = 1e-13, epsilon = 1e-13);
        }
    }

    #[test]
    fn unknown_waveform_constraints_are_enforced() {
        let ranges = ParameterRanges::default();
        assert!(test_sequence(
            &WaveformKind::QTriangular { period: 300 },
            100,
            &ranges,
            1,
            0
        )
        .is_err());
        assert!(test_sequence(
            &WaveformKind::Sinusoidal {
                frequency: 0.5,
                phase: 0.0
            },
            100,
            &ranges,
            1,
            0
        )
        .is_err());
        assert!(test_sequence(
            &WaveformKind::Chirp { f0: 0.2, f1: 0.3 },
            100,
            &ranges,
            1,
            0
        )
        .is_err());
    }

    #[test]
    fn generated_coordinates_stay_in_closed_intervals() {
        let ranges = ParameterRanges::default();
        for kind in [
            WaveformKind::Chirp { f0: 1.0, f1: 40.0 },
            WaveformKind::Sinusoidal {
                frequency: 10.0,
                phase: 0.4,
            },
            WaveformKind::QTriangular { period: 50 },
        ] {
            let ds = test_sequence(&kind, 500, &ranges, 3, 0).unwrap();
            for row in &ds.inputs {
                for (v, iv) in row.as_array().iter().zip(ranges.as_array()) {
                    assert!(iv.contains(*v), "{v} outside [{}, {}]", iv.lo, iv.hi);
                }
            }
        }
    }

    #[test]
    fn sweep_grid_visits_all_combinations() {
        let ranges = ParameterRanges::default();
        let kind = WaveformKind::Sinusoidal {
            frequency: 2.0,
            phase: 0.0,
        };
        // 3^4 = 81 combinations over 810 samples: each segment has 10 rows
        let ds = test_sequence(&kind, 810, &ranges, 3, 0).unwrap();
        let mut seen = std::collections::HashSet::new();
        for row in &ds.inputs {
            seen.insert(format!("{}/{}/{}/{}", row.l, row.ld, row.tsi, row.tox));
        }
        assert_eq!(seen.len(), 81);
        // fastest-varying input is tox
        assert_ne!(ds.inputs[0].tox, ds.inputs[10].tox);
        assert_eq!(ds.inputs[0].l, ds.inputs[10].l);
    }

    #[test]
    fn labeling_single_row_matches_direct_call() {
        let params = OracleParams::default();
        let row = DeviceInputs::new(30.0, 10.0, 10.0, 2.0, 0.3, 0.6);
        let ds = Dataset::new(vec![row], "one");
        let labeled = label_with_oracle(&ds, &params).unwrap();
        assert_eq!(
            labeled.outputs.unwrap(),
            vec![threshold_voltage(&params, &row).unwrap()]
        );
    }

    #[test]
    fn labeling_zero_barrier_collapses_to_vt0() {
        let params = OracleParams {
            n_f: 0.0,
            barrier: BarrierSpec::new(BarrierForm::Zero),
            ..OracleParams::default()
        };
        let ds = random_training_set(&ParameterRanges::default(), 40, 5).unwrap();
        let labeled = label_with_oracle(&ds, &params).unwrap();
        for (row, out) in labeled.inputs.iter().zip(labeled.outputs.as_ref().unwrap()) {
            assert_eq!(*out, vt0(&params, row).unwrap());
        }
    }

    #[test]
    fn labeling_matches_rowwise_map_and_keeps_inputs() {
        let params = OracleParams::default();
        let ds = random_training_set(&ParameterRanges::default(), 100, 11).unwrap();
        let labeled = label_with_oracle(&ds, &params).unwrap();
        assert_eq!(labeled.inputs, ds.inputs);
        let brute: Vec<f64> = ds
            .inputs
            .iter()
            .map(|r| threshold_voltage(&params, r).unwrap())
            .collect();
        assert_eq!(labeled.outputs.unwrap(), brute);
    }

    #[test]
    fn labeling_error_carries_row_index() {
        let params = OracleParams {
            barrier: BarrierSpec {
                max_iterations: 1,
                ..BarrierSpec::default()
            },
            ..OracleParams::default()
        };
        let ds = random_training_set(&ParameterRanges::default(), 5, 1).unwrap();
        match label_with_oracle(&ds, &params) {
            Err(Error::AtRow { row, .. }) => assert_eq!(row, 0),
            other => panic!("expected row error, got {other:?}"),
        }
    }
}
