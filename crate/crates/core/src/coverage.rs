//! State-space coverage measures over a set of visited states.
//!
//! All measures operate on data normalised to the unit box `[0, 1]^d`, see
//! [`normalize`]. `X_Urel` compares the data against a uniform sample over the
//! box with one of two divergence estimators: a kNN density-ratio estimator and
//! the nearest-neighbour-ratio (NNR) estimator, which counts how many of a
//! point's pooled neighbours come from each sample.

use std::collections::HashSet;
use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::knn::{KdTree, Neighbor};
use crate::rng;

pub const DEFAULT_BIN_MIN_POINTS: usize = 10;
pub const DEFAULT_KNN_K: usize = 10;

/// Row-major `n x d` matrix of states.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn from_flat(values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dataset dimension must be at least 1".into()));
        }
        if values.is_empty() || !values.len().is_multiple_of(dim) {
            return Err(Error::Input(format!(
                "dataset needs a non-empty multiple of {dim} values, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite value in row {}", pos / dim)));
        }
        Ok(Dataset { dim, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or_else(|| Error::Input("empty dataset".into()))?;
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::Input(format!("row {bad} has {} values, expected {dim}", rows[bad].len())));
        }
        Self::from_flat(rows.concat(), dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpaceBounds {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

impl StateSpaceBounds {
    pub fn new(low: Vec<f64>, high: Vec<f64>) -> Result<Self> {
        let b = StateSpaceBounds { low, high };
        b.validate()?;
        Ok(b)
    }

    pub fn unit(dim: usize) -> Self {
        StateSpaceBounds { low: vec![0.0; dim], high: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.low.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.low.is_empty() || self.low.len() != self.high.len() {
            return Err(Error::Input("bounds must be non-empty with matching low/high lengths".into()));
        }
        for (i, (&l, &h)) in self.low.iter().zip(&self.high).enumerate() {
            if !(l.is_finite() && h.is_finite()) {
                return Err(Error::Input(format!(
                    "dimension {i} has infinite limits; infer them from samples first"
                )));
            }
            if l >= h {
                return Err(Error::Input(format!("dimension {i}: low {l} must be below high {h}")));
            }
        }
        Ok(())
    }
}

/// Empirical per-dimension limits. Zero-range dimensions are padded by
/// `1e-9 * max(1, |low|)`.
pub fn infer_bounds(data: &Dataset) -> Result<StateSpaceBounds> {
    if data.len() < 2 {
        return Err(Error::Input("at least two states are needed to infer bounds".into()));
    }
    let d = data.dim();
    let mut low = vec![f64::INFINITY; d];
    let mut high = vec![f64::NEG_INFINITY; d];
    for row in data.rows() {
        for j in 0..d {
            low[j] = low[j].min(row[j]);
            high[j] = high[j].max(row[j]);
        }
    }
    for j in 0..d {
        if high[j] <= low[j] {
            high[j] = low[j] + 1e-9 * low[j].abs().max(1.0);
        }
    }
    StateSpaceBounds::new(low, high)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub data: Dataset,
    /// Number of coordinates that fell outside the bounds and were clamped.
    pub clamped: usize,
}

/// Maps `data` affinely into the unit box, clamping coordinates outside the bounds.
pub fn normalize(data: &Dataset, bounds: &StateSpaceBounds) -> Result<Normalized> {
    bounds.validate()?;
    if bounds.dim() != data.dim() {
        return Err(Error::Input(format!(
            "bounds have dimension {} but data has {}",
            bounds.dim(),
            data.dim()
        )));
    }
    let d = data.dim();
    let mut clamped = 0;
    let values = data
        .as_flat()
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            let j = idx % d;
            let u = (v - bounds.low[j]) / (bounds.high[j] - bounds.low[j]);
            if !(0.0..=1.0).contains(&u) {
                clamped += 1;
            }
            u.clamp(0.0, 1.0)
        })
        .collect();
    Ok(Normalized { data: Dataset { dim: d, values }, clamped })
}

/// Divisions per axis for the histogram measure, `floor((n / c)^(1/d))`, at least 1.
pub fn bin_divisions(n: usize, c: usize, d: usize) -> usize {
    let k = (n as f64 / c as f64).powf(1.0 / d as f64);
    let mut k = (k + 1e-9).floor().max(1.0) as usize;
    // Guard the float rounding above: k^d must not exceed n / c.
    while k > 1 && (k as f64).powi(d as i32) > n as f64 / c as f64 {
        k -= 1;
    }
    k
}

/// Fraction of non-empty cells in an equal grid over the unit box.
pub fn x_bin(data: &Dataset, c: usize) -> Result<f64> {
    if c == 0 {
        return Err(Error::Parameter("points per bin must be at least 1".into()));
    }
    let n = data.len();
    if n < c {
        log::warn!("x_bin: {n} points is fewer than {c} per bin; a single bin is used");
    }
    let k = bin_divisions(n, c, data.dim());
    if k == 1 {
        return Ok(1.0);
    }
    let occupied: HashSet<u64> = data
        .rows()
        .map(|row| {
            row.iter().fold(0u64, |acc, &v| {
                let cell = ((v * k as f64).floor() as usize).min(k - 1) as u64;
                acc * k as u64 + cell
            })
        })
        .collect();
    Ok(occupied.len() as f64 / (k as f64).powi(data.dim() as i32))
}

/// Mean side length of the bounding box.
pub fn x_bbm(data: &Dataset) -> f64 {
    let d = data.dim();
    (0..d)
        .map(|j| {
            let (lo, hi) = data
                .column(j)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            hi - lo
        })
        .sum::<f64>()
        / d as f64
}

/// Trace of the sample covariance (`n - 1` denominator).
pub fn x_nn(data: &Dataset) -> Result<f64> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Input("x_nn needs at least two states".into()));
    }
    Ok((0..data.dim())
        .map(|j| {
            let x0 = data.row(0)[j];
            let mean = x0 + data.column(j).map(|v| v - x0).sum::<f64>() / n as f64;
            data.column(j).map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        })
        .sum())
}

pub fn ln_unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    h * PI.ln() - ln_gamma(h + 1.0)
}

/// Volume of the `d`-dimensional unit ball, `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    ln_unit_ball_volume(d).exp()
}

/// `ln( k / (n V_d R^d) )`; `+inf` when `R = 0`.
fn ln_knn_density(k: usize, n: usize, d: usize, dist: f64) -> f64 {
    if dist == 0.0 {
        return f64::INFINITY;
    }
    (k as f64).ln() - (n as f64).ln() - ln_unit_ball_volume(d) - d as f64 * dist.ln()
}

/// kNN density estimate `k / (n V_d R_k^d)` at `query` from the points of `data`.
///
/// `exclude` removes the query's own row when it belongs to `data`; `n` then
/// counts the remaining points. A zero neighbour distance clamps the density
/// to `n`.
pub fn knn_density(query: &[f64], data: &Dataset, k: usize, exclude: Option<usize>) -> Result<f64> {
    let tree = KdTree::new(data.as_flat().to_vec(), data.dim())?;
    let nn = tree.knn(query, k, exclude)?;
    let n = data.len() - usize::from(exclude.is_some());
    let dist = nn[k - 1].distance();
    if dist == 0.0 {
        log::warn!("knn_density: {k} duplicate points at the query; density clamped");
        return Ok(n as f64);
    }
    Ok(ln_knn_density(k, n, data.dim(), dist).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Knn,
    Nnr,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Knn => "knn",
            Estimator::Nnr => "nnr",
        }
    }
}

/// Parameters for [`x_urel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UrelParams {
    pub estimator: Estimator,
    /// Neighbour count; `None` picks the estimator default.
    pub k: Option<usize>,
    /// Size of the uniform reference sample; `None` matches the data size.
    pub uniform_samples: Option<usize>,
    pub seed: u64,
}

impl UrelParams {
    pub fn nnr(seed: u64) -> Self {
        UrelParams { estimator: Estimator::Nnr, k: None, uniform_samples: None, seed }
    }

    pub fn knn(seed: u64) -> Self {
        UrelParams { estimator: Estimator::Knn, k: None, uniform_samples: None, seed }
    }

    /// Neighbour count actually used for data of size `n`.
    pub fn resolved_k(&self, n: usize) -> usize {
        let m = self.uniform_samples.unwrap_or(n);
        self.k.unwrap_or(match self.estimator {
            Estimator::Nnr => default_nnr_k(n + m),
            Estimator::Knn => DEFAULT_KNN_K,
        })
    }
}

/// `ceil(sqrt(total))`.
pub fn default_nnr_k(total: usize) -> usize {
    let mut k = (total as f64).sqrt() as usize;
    while k * k < total {
        k += 1;
    }
    while k > 1 && (k - 1) * (k - 1) >= total {
        k -= 1;
    }
    k.max(1)
}

fn check_same_dim(y: &Dataset, x: &Dataset) -> Result<()> {
    if y.dim() != x.dim() {
        return Err(Error::Input(format!("sample dimensions differ: {} vs {}", y.dim(), x.dim())));
    }
    Ok(())
}

/// Capped divergence summand: `min(-ln r, ln(C_U / C_L))` with `C_L = 1/n`, `C_U = n`.
fn nnr_summand(ratio: f64, n_total: usize) -> f64 {
    let cap = 2.0 * (n_total as f64).ln();
    if ratio <= 0.0 {
        cap
    } else {
        (-ratio.ln()).min(cap)
    }
}

/// NNR average over the query points of one sample. `from_y(index)` says
/// whether a pooled index belongs to the query sample.
fn nnr_mean(neighbors: &[Vec<Neighbor>], from_y: impl Fn(usize) -> bool, m: usize, n: usize) -> f64 {
    let eta = m as f64 / n as f64;
    let total: f64 = neighbors
        .iter()
        .map(|nn| {
            let same = nn.iter().filter(|nb| from_y(nb.index)).count();
            let other = nn.len() - same;
            nnr_summand(eta * other as f64 / (same as f64 + 1.0), m + n)
        })
        .sum();
    (total / m as f64).max(0.0)
}

/// NNR estimate of `KL(P || Q)` from `y ~ P` and `x ~ Q`.
pub fn kl_nnr(y: &Dataset, x: &Dataset, k: usize, exec: Execution) -> Result<f64> {
    check_same_dim(y, x)?;
    let (m, n) = (y.len(), x.len());
    if k == 0 || k >= m + n {
        return Err(Error::Parameter(format!("k = {k} must be in [1, {})", m + n)));
    }
    if n < k {
        return Err(Error::Parameter(format!("k = {k} exceeds the {n} points of the reference sample")));
    }
    let mut pooled = x.as_flat().to_vec();
    pooled.extend_from_slice(y.as_flat());
    let tree = KdTree::new(pooled, x.dim())?;
    let neighbors = exec.try_map_indexed(m, |i| tree.knn(y.row(i), k, Some(n + i)))?;
    Ok(nnr_mean(&neighbors, |idx| idx >= n, m, n))
}

/// Both NNR directions between `data` and `uniform` from one pooled search:
/// returns `(KL(data || U), KL(U || data))`.
pub fn kl_nnr_symmetric(data: &Dataset, uniform: &Dataset, k: usize, exec: Execution) -> Result<(f64, f64)> {
    check_same_dim(data, uniform)?;
    let (nd, nu) = (data.len(), uniform.len());
    if k == 0 || k >= nd + nu || k > nd.min(nu) {
        return Err(Error::Parameter(format!("k = {k} is invalid for samples of size {nd} and {nu}")));
    }
    let mut pooled = data.as_flat().to_vec();
    pooled.extend_from_slice(uniform.as_flat());
    let tree = KdTree::new(pooled, data.dim())?;
    let all = tree.knn_self(k, exec)?;
    let (data_nn, uniform_nn) = all.split_at(nd);
    let d_given_u = nnr_mean(data_nn, |idx| idx < nd, nd, nu);
    let u_given_d = nnr_mean(uniform_nn, |idx| idx >= nd, nu, nd);
    Ok((d_given_u, u_given_d))
}

/// kNN density-ratio estimate of `KL(P || Q)` from `y ~ P` and `x ~ Q`. Both
/// densities are clamped into `[1/n, n]` with `n = |x| + |y|`.
pub fn kl_knn(y: &Dataset, x: &Dataset, k: usize, exec: Execution) -> Result<f64> {
    check_same_dim(y, x)?;
    let (m, n) = (y.len(), x.len());
    if k == 0 || k >= m || k > n {
        return Err(Error::Parameter(format!("k = {k} is invalid for samples of size {m} and {n}")));
    }
    let d = y.dim();
    let y_tree = KdTree::new(y.as_flat().to_vec(), d)?;
    let x_tree = KdTree::new(x.as_flat().to_vec(), d)?;
    let cap = ((m + n) as f64).ln();
    let mut clamped = 0usize;
    let terms = exec.try_map_indexed(m, |i| -> Result<(f64, bool)> {
        let q = y.row(i);
        let dp = y_tree.knn(q, k, Some(i))?[k - 1].distance();
        let dq = x_tree.knn(q, k, None)?[k - 1].distance();
        let lp = ln_knn_density(k, m - 1, d, dp);
        let lq = ln_knn_density(k, n, d, dq);
        let hit = lp.abs() > cap || lq.abs() > cap;
        Ok((lp.clamp(-cap, cap) - lq.clamp(-cap, cap), hit))
    })?;
    let mut total = 0.0;
    for (t, hit) in terms {
        total += t;
        clamped += usize::from(hit);
    }
    if clamped > 0 {
        log::debug!("kl_knn: {clamped} of {m} density pairs hit the clamp");
    }
    Ok((total / m as f64).max(0.0))
}

/// `n` points uniform on the unit box.
pub fn uniform_sample(n: usize, d: usize, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    let values = (0..n * d).map(|_| r.random::<f64>()).collect();
    Dataset { dim: d, values }
}

/// Uniform-relative coverage `-KL(U || Q_D) - KL(Q_D || U)` of normalised data.
/// Zero is perfectly uniform coverage; more negative is worse.
pub fn x_urel(data: &Dataset, params: &UrelParams, exec: Execution) -> Result<f64> {
    let n = data.len();
    if n < 10 {
        return Err(Error::Input(format!("x_urel needs at least 10 states, got {n}")));
    }
    let m = params.uniform_samples.unwrap_or(n);
    if m == 0 {
        return Err(Error::Parameter("uniform sample size must be at least 1".into()));
    }
    let k = params.resolved_k(n);
    let uniform = uniform_sample(m, data.dim(), params.seed);
    let (forward, backward) = match params.estimator {
        Estimator::Nnr => kl_nnr_symmetric(data, &uniform, k, exec)?,
        Estimator::Knn => (kl_knn(data, &uniform, k, exec)?, kl_knn(&uniform, data, k, exec)?),
    };
    Ok(-backward - forward)
}
