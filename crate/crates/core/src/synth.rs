//! Synthetic benchmark for the coverage measures: data families whose true
//! coverage is known to rise and then fall with a scale parameter, and the
//! measure-vs-scale sweep over them.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalDist};

use crate::coverage::{self, Dataset, Estimator, UrelParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::{self, Rng};

/// Per-dimension standard deviation of each bimodal component.
pub const BIMODAL_SD: f64 = 0.05;
pub const MAX_SCALE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GrowingUniform,
    BimodalTruncnorm,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::GrowingUniform => "growing_uniform",
            Family::BimodalTruncnorm => "bimodal_truncnorm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    XBin,
    XBbm,
    XNn,
    XUrelKnn,
    XUrelNnr,
}

impl Measure {
    pub const ALL: [Measure; 5] = [Measure::XBin, Measure::XBbm, Measure::XNn, Measure::XUrelKnn, Measure::XUrelNnr];

    pub fn name(self) -> &'static str {
        match self {
            Measure::XBin => "x_bin",
            Measure::XBbm => "x_bbm",
            Measure::XNn => "x_nn",
            Measure::XUrelKnn => "x_urel_knn",
            Measure::XUrelNnr => "x_urel_nnr",
        }
    }
}

/// `count` evenly spaced scales from 0.01 to 1.5.
pub fn default_scales(count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![1.0],
        _ => (0..count).map(|i| 0.01 + (MAX_SCALE - 0.01) * i as f64 / (count - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub family: Family,
    pub d: usize,
    pub n: usize,
    pub scales: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        SynthSpec { family, d: 25, n: 2500, scales: default_scales(15), reps: 10, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if self.n < 10 {
            return Err(Error::Config(format!("n must be at least 10, got {}", self.n)));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.scales.is_empty() {
            return Err(Error::Config("at least one scale is required".into()));
        }
        if let Some(s) = self.scales.iter().find(|s| !(s.is_finite() && **s > 0.0 && **s <= MAX_SCALE)) {
            return Err(Error::Config(format!("scale {s} outside (0, {MAX_SCALE}]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub data: Dataset,
    /// Coordinates moved onto the unit-box boundary.
    pub clipped: usize,
}

/// Uniform on `[0.5 - scale/2, 0.5 + scale/2]^d`, clipped to the unit box.
pub fn gen_growing_uniform(scale: f64, n: usize, d: usize, rng: &mut Rng) -> Result<Generated> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Parameter(format!("scale must be > 0, got {scale}")));
    }
    let lo = 0.5 - scale / 2.0;
    let mut clipped = 0;
    let values = (0..n * d)
        .map(|_| {
            let v = lo + scale * rng.random::<f64>();
            if !(0.0..=1.0).contains(&v) {
                clipped += 1;
            }
            v.clamp(0.0, 1.0)
        })
        .collect();
    Ok(Generated { data: Dataset::from_flat(values, d)?, clipped })
}

/// Component centres `0.5 -/+ scale / 4` of the bimodal family.
pub fn bimodal_centers(scale: f64) -> (f64, f64) {
    (0.5 - 0.25 * scale, 0.5 + 0.25 * scale)
}

/// Equal-weight mixture of two normals truncated to the unit box. Each point
/// picks one component for all of its coordinates; coordinates are drawn by
/// rejection inside `[0, 1]`.
pub fn gen_bimodal_truncnorm(scale: f64, n: usize, d: usize, rng: &mut Rng) -> Result<Dataset> {
    if !(scale.is_finite() && scale > 0.0 && scale <= MAX_SCALE) {
        return Err(Error::Parameter(format!("scale must be in (0, {MAX_SCALE}], got {scale}")));
    }
    let (c_lo, c_hi) = bimodal_centers(scale);
    let unit = NormalDist::new(0.0, 1.0).expect("standard normal");
    let acceptance = |c: f64| unit.cdf((1.0 - c) / BIMODAL_SD) - unit.cdf(-c / BIMODAL_SD);
    if acceptance(c_lo).min(acceptance(c_hi)) < 1e-3 {
        return Err(Error::Parameter("truncation acceptance below 1e-3".into()));
    }
    let lo = Normal::new(c_lo, BIMODAL_SD).map_err(|e| Error::Parameter(e.to_string()))?;
    let hi = Normal::new(c_hi, BIMODAL_SD).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut values = Vec::with_capacity(n * d);
    for _ in 0..n {
        let comp = if rng.random::<bool>() { &hi } else { &lo };
        for _ in 0..d {
            let v = loop {
                let v = comp.sample(rng);
                if (0.0..=1.0).contains(&v) {
                    break v;
                }
            };
            values.push(v);
        }
    }
    Dataset::from_flat(values, d)
}

pub fn generate(family: Family, scale: f64, n: usize, d: usize, rng: &mut Rng) -> Result<Dataset> {
    match family {
        Family::GrowingUniform => gen_growing_uniform(scale, n, d, rng).map(|g| g.data),
        Family::BimodalTruncnorm => gen_bimodal_truncnorm(scale, n, d, rng),
    }
}

/// Estimator settings for the sweep; `None` picks each estimator's default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSettings {
    pub bin_min_points: usize,
    pub knn_k: Option<usize>,
    pub nnr_k: Option<usize>,
    pub uniform_samples: Option<usize>,
}

impl Default for MeasureSettings {
    fn default() -> Self {
        MeasureSettings {
            bin_min_points: coverage::DEFAULT_BIN_MIN_POINTS,
            knn_k: None,
            nnr_k: None,
            uniform_samples: None,
        }
    }
}

/// Computes every measure on one normalised dataset.
pub fn measure_all(data: &Dataset, settings: &MeasureSettings, urel_seed: u64, exec: Execution) -> Result<[f64; 5]> {
    let urel = |estimator, k| UrelParams { estimator, k, uniform_samples: settings.uniform_samples, seed: urel_seed };
    Ok([
        coverage::x_bin(data, settings.bin_min_points)?,
        coverage::x_bbm(data),
        coverage::x_nn(data)?,
        coverage::x_urel(data, &urel(Estimator::Knn, settings.knn_k), exec)?,
        coverage::x_urel(data, &urel(Estimator::Nnr, settings.nnr_k), exec)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawRecord {
    pub scale_index: usize,
    pub scale: f64,
    pub rep: usize,
    pub measure: Measure,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRecord {
    pub scale_index: usize,
    pub scale: f64,
    pub measure: Measure,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub family: Family,
    pub scales: Vec<f64>,
    /// Ordered by scale, then repetition, then measure.
    pub raw: Vec<RawRecord>,
    /// Ordered by scale, then measure.
    pub summary: Vec<SummaryRecord>,
}

impl SweepResult {
    /// Mean of `measure` at every scale, in scale order.
    pub fn means(&self, measure: Measure) -> Vec<f64> {
        self.summary.iter().filter(|s| s.measure == measure).map(|s| s.mean).collect()
    }

    pub fn cell(&self, scale_index: usize, measure: Measure) -> Option<&SummaryRecord> {
        self.summary.iter().find(|s| s.scale_index == scale_index && s.measure == measure)
    }
}

/// Seed for the data of one `(scale, repetition)` cell.
pub fn cell_seed(seed: u64, scale_index: usize, rep: usize) -> u64 {
    rng::derive_seed(seed, &[scale_index as u64, rep as u64])
}

fn urel_seed(seed: u64, scale_index: usize, rep: usize) -> u64 {
    rng::derive_seed(seed, &[scale_index as u64, rep as u64, 1])
}

pub fn run_sweep(spec: &SynthSpec, settings: &MeasureSettings, exec: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let cells = spec.scales.len() * spec.reps;
    let values = exec.try_map_indexed(cells, |cell| {
        let (si, rep) = (cell / spec.reps, cell % spec.reps);
        let mut r = rng::seeded(cell_seed(spec.seed, si, rep));
        let data = generate(spec.family, spec.scales[si], spec.n, spec.d, &mut r)?;
        measure_all(&data, settings, urel_seed(spec.seed, si, rep), exec)
    })?;

    let mut raw = Vec::with_capacity(cells * Measure::ALL.len());
    for (cell, vals) in values.iter().enumerate() {
        let (si, rep) = (cell / spec.reps, cell % spec.reps);
        for (m, &value) in Measure::ALL.iter().zip(vals) {
            raw.push(RawRecord { scale_index: si, scale: spec.scales[si], rep, measure: *m, value });
        }
    }

    let mut summary = Vec::with_capacity(spec.scales.len() * Measure::ALL.len());
    for (si, &scale) in spec.scales.iter().enumerate() {
        for (mi, &measure) in Measure::ALL.iter().enumerate() {
            let reps = &values[si * spec.reps..(si + 1) * spec.reps];
            let xs = reps.iter().map(|v| v[mi]);
            let mean = xs.clone().sum::<f64>() / spec.reps as f64;
            let min = xs.clone().fold(f64::INFINITY, f64::min);
            let max = xs.fold(f64::NEG_INFINITY, f64::max);
            summary.push(SummaryRecord { scale_index: si, scale, measure, mean: mean.clamp(min, max), min, max });
        }
    }
    Ok(SweepResult { family: spec.family, scales: spec.scales.clone(), raw, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growing_uniform_tiny_scale() {
        let mut r = rng::seeded(1);
        let g = gen_growing_uniform(0.01, 500, 4, &mut r).unwrap();
        assert!(g.data.as_flat().iter().all(|v| (v - 0.5).abs() <= 0.005));
        assert_eq!(g.clipped, 0);
    }

    #[test]
    fn growing_uniform_full_scale_no_clip() {
        let mut r = rng::seeded(2);
        let g = gen_growing_uniform(1.0, 2000, 5, &mut r).unwrap();
        assert_eq!(g.clipped, 0);
    }

    #[test]
    fn growing_uniform_clip_fraction() {
        // Pre-clip support [-0.25, 1.25]: mass 0.25 / 1.5 outside on each side.
        let mut r = rng::seeded(3);
        let (n, d) = (10_000, 3);
        let g = gen_growing_uniform(1.5, n, d, &mut r).unwrap();
        let frac = g.clipped as f64 / (n * d) as f64;
        assert!((frac - 1.0 / 3.0).abs() < 0.02, "{frac}");
        assert!(g.data.as_flat().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn bimodal_cluster_centres() {
        let mut r = rng::seeded(4);
        let data = gen_bimodal_truncnorm(1.0, 4000, 2, &mut r).unwrap();
        let (lo, hi): (Vec<&[f64]>, Vec<&[f64]>) = data.rows().partition(|row| row[0] < 0.5);
        for (group, centre) in [(lo, 0.25), (hi, 0.75)] {
            for j in 0..2 {
                let m = group.iter().map(|r| r[j]).sum::<f64>() / group.len() as f64;
                assert!((m - centre).abs() < 0.01, "centre {m} vs {centre}");
            }
        }
        assert_eq!(bimodal_centers(1.5), (0.125, 0.875));
    }

    #[test]
    fn bimodal_within_box_and_small_scale_is_compact() {
        let mut r = rng::seeded(5);
        for scale in [0.01, 0.75, 1.5] {
            let data = gen_bimodal_truncnorm(scale, 1000, 3, &mut r).unwrap();
            assert!(data.as_flat().iter().all(|v| (0.0..=1.0).contains(v)));
        }
        let tight = gen_bimodal_truncnorm(0.01, 1000, 3, &mut r).unwrap();
        let wide = gen_bimodal_truncnorm(1.0, 1000, 3, &mut r).unwrap();
        assert!(coverage::x_bbm(&tight) < coverage::x_bbm(&wide));
        assert!(gen_bimodal_truncnorm(1.6, 10, 1, &mut r).is_err());
    }

    #[test]
    fn default_grid() {
        let s = default_scales(15);
        assert_eq!(s.len(), 15);
        assert_eq!(s[0], 0.01);
        assert!((s[14] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn single_rep_summary_equals_raw() {
        let spec = SynthSpec { family: Family::GrowingUniform, d: 3, n: 200, scales: vec![0.5, 1.0], reps: 1, seed: 9 };
        let res = run_sweep(&spec, &MeasureSettings::default(), Execution::Parallel).unwrap();
        assert_eq!(res.summary.len(), 10);
        for s in &res.summary {
            assert_eq!(s.mean, s.min);
            assert_eq!(s.min, s.max);
            let raw = res.raw.iter().find(|r| r.scale_index == s.scale_index && r.measure == s.measure).unwrap();
            assert_eq!(raw.value, s.mean);
        }
    }

    #[test]
    fn sweep_grid_complete_and_reproducible() {
        let spec = SynthSpec { family: Family::BimodalTruncnorm, d: 4, n: 120, scales: vec![0.2, 0.8, 1.4], reps: 3, seed: 21 };
        let a = run_sweep(&spec, &MeasureSettings::default(), Execution::Parallel).unwrap();
        let b = run_sweep(&spec, &MeasureSettings::default(), Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.raw.len(), 3 * 3 * 5);
        for s in &a.summary {
            assert!(s.min <= s.mean && s.mean <= s.max);
        }
    }

    #[test]
    fn invalid_spec() {
        let mut spec = SynthSpec::new(Family::GrowingUniform, 0);
        spec.scales = vec![2.0];
        assert!(spec.validate().is_err());
        spec.scales = vec![1.0];
        spec.n = 5;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn x_bin_saturates_in_high_dimension() {
        let mut r = rng::seeded(6);
        for scale in [0.01, 0.5, 1.5] {
            let g = gen_growing_uniform(scale, 2500, 25, &mut r).unwrap();
            assert_eq!(coverage::x_bin(&g.data, 10).unwrap(), 1.0);
        }
    }
}
