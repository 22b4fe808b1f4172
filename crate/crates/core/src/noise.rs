//! Gaussian and Ornstein-Uhlenbeck action noise, and the composition of a
//! noise sample with a policy action.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::schedule::ScheduleSpec;

/// Noise scales used throughout the experiments.
pub const SIGMA_GRID: [f64; 5] = [0.1, 0.5, 0.9, 1.3, 1.7];

pub const DEFAULT_THETA: f64 = 0.15;
pub const DEFAULT_DT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    OrnsteinUhlenbeck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    pub sigma: f64,
    /// Per-dimension mean (Gaussian) or drift target (OU).
    pub mu: Vec<f64>,
    /// Mean reversion rate; ignored for Gaussian noise.
    pub theta: f64,
    /// Time increment; ignored for Gaussian noise.
    pub dt: f64,
}

impl NoiseConfig {
    pub fn gaussian(sigma: f64, dim: usize) -> Self {
        Self::new(NoiseKind::Gaussian, sigma, dim)
    }

    pub fn ornstein_uhlenbeck(sigma: f64, dim: usize) -> Self {
        Self::new(NoiseKind::OrnsteinUhlenbeck, sigma, dim)
    }

    pub fn new(kind: NoiseKind, sigma: f64, dim: usize) -> Self {
        NoiseConfig { kind, sigma, mu: vec![0.0; dim], theta: DEFAULT_THETA, dt: DEFAULT_DT }
    }

    pub fn with_mu(mut self, mu: Vec<f64>) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.is_empty() {
            return Err(Error::Config("noise dimension must be at least 1".into()));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Config(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(Error::Config(format!("theta must be > 0, got {}", self.theta)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::Config("mu must be finite".into()));
        }
        Ok(())
    }

    /// Long-run per-dimension standard deviation of the discretised OU recursion.
    pub fn ou_stationary_sd(&self) -> f64 {
        let a = 1.0 - self.theta * self.dt;
        self.sigma * self.dt.sqrt() / (1.0 - a * a).sqrt()
    }
}

/// Mutable state of one noise process: the previous sample and its own RNG stream.
#[derive(Debug, Clone)]
pub struct NoiseState {
    prev: Vec<f64>,
    rng: Rng,
}

impl NoiseState {
    pub fn new(dim: usize, seed: u64) -> Self {
        NoiseState { prev: vec![0.0; dim], rng: rng::seeded(seed) }
    }

    /// Starts the process from an arbitrary previous value instead of zero.
    pub fn with_prev(prev: Vec<f64>, seed: u64) -> Self {
        NoiseState { prev, rng: rng::seeded(seed) }
    }

    pub fn prev(&self) -> &[f64] {
        &self.prev
    }

    pub fn dim(&self) -> usize {
        self.prev.len()
    }

    /// Sets the previous sample back to zero, keeping the RNG stream.
    pub fn reset(&mut self) {
        self.prev.iter_mut().for_each(|p| *p = 0.0);
    }

    fn check(&self, cfg: &NoiseConfig) -> Result<()> {
        if cfg.dim() != self.dim() {
            return Err(Error::Config(format!(
                "noise config has dimension {} but state has {}",
                cfg.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Draws `eps ~ N(mu, sigma^2 I)`.
pub fn sample_gaussian(cfg: &NoiseConfig, state: &mut NoiseState) -> Result<Vec<f64>> {
    if cfg.kind != NoiseKind::Gaussian {
        return Err(Error::Config("sample_gaussian needs a gaussian config".into()));
    }
    state.check(cfg)?;
    Ok(cfg
        .mu
        .iter()
        .map(|&m| {
            let xi: f64 = StandardNormal.sample(&mut state.rng);
            m + cfg.sigma * xi
        })
        .collect())
}

/// One explicit Euler step of the OU process:
/// `eps = prev + theta (mu - prev) dt + sigma sqrt(dt) xi`.
pub fn step_ou(cfg: &NoiseConfig, state: &mut NoiseState) -> Result<Vec<f64>> {
    if cfg.kind != NoiseKind::OrnsteinUhlenbeck {
        return Err(Error::Config("step_ou needs an ornstein_uhlenbeck config".into()));
    }
    state.check(cfg)?;
    let scale = cfg.sigma * cfg.dt.sqrt();
    for (p, &m) in state.prev.iter_mut().zip(&cfg.mu) {
        let xi: f64 = StandardNormal.sample(&mut state.rng);
        *p = *p + cfg.theta * (m - *p) * cfg.dt + scale * xi;
    }
    Ok(state.prev.clone())
}

/// Draws the next sample for whichever kind `cfg` describes.
pub fn sample(cfg: &NoiseConfig, state: &mut NoiseState) -> Result<Vec<f64>> {
    match cfg.kind {
        NoiseKind::Gaussian => sample_gaussian(cfg, state),
        NoiseKind::OrnsteinUhlenbeck => step_ou(cfg, state),
    }
}

/// Box-shaped action space `[low, high]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpace {
    low: Vec<f64>,
    high: Vec<f64>,
}

impl ActionSpace {
    pub fn new(low: Vec<f64>, high: Vec<f64>) -> Result<Self> {
        if low.is_empty() || low.len() != high.len() {
            return Err(Error::Config("action space bounds must be non-empty and of equal length".into()));
        }
        for (i, (&l, &h)) in low.iter().zip(&high).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::Config(format!("action dimension {i}: need finite low < high, got [{l}, {h}]")));
            }
        }
        Ok(ActionSpace { low, high })
    }

    /// `[-1, 1]^dim`.
    pub fn symmetric(dim: usize) -> Self {
        ActionSpace { low: vec![-1.0; dim], high: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.low.len()
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }
}

/// Adds scaled action noise to a policy action:
///
/// `clip_[lo,hi]( a + beta * ( clip_[-1,1](eps) * (hi - lo)/2 + (hi + lo)/2 ) )`
///
/// The midpoint term is applied as written, so on an asymmetric space a zero
/// noise sample still shifts the action by `beta * (hi + lo)/2`.
pub fn compose_action(a_tilde: &[f64], eps: &[f64], beta: f64, space: &ActionSpace) -> Result<Vec<f64>> {
    let dim = space.dim();
    if a_tilde.len() != dim || eps.len() != dim {
        return Err(Error::Input(format!(
            "dimension mismatch: action {}, noise {}, space {}",
            a_tilde.len(),
            eps.len(),
            dim
        )));
    }
    if !beta.is_finite() || !(0.0..=1.0).contains(&beta) {
        return Err(Error::Input(format!("beta must be in [0, 1], got {beta}")));
    }
    if a_tilde.iter().chain(eps).any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite action or noise value".into()));
    }
    Ok((0..dim)
        .map(|i| {
            let (lo, hi) = (space.low[i], space.high[i]);
            let rescaled = eps[i].clamp(-1.0, 1.0) * (hi - lo) / 2.0 + (hi + lo) / 2.0;
            (a_tilde[i] + beta * rescaled).clamp(lo, hi)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseStep {
    pub t: usize,
    pub beta: f64,
    pub eps: Vec<f64>,
    pub action: Vec<f64>,
}

/// Rolls out the noise-only policy (zero policy action) for `steps` steps.
/// Step `t` uses `beta = schedule.beta_at(t)`.
pub fn noise_only_actions(
    cfg: &NoiseConfig,
    schedule: &ScheduleSpec,
    space: &ActionSpace,
    steps: usize,
    seed: u64,
) -> Result<Vec<NoiseStep>> {
    cfg.validate()?;
    if steps == 0 {
        return Err(Error::Input("steps must be at least 1".into()));
    }
    if space.dim() != cfg.dim() {
        return Err(Error::Config("action space and noise dimension differ".into()));
    }
    let mut state = NoiseState::new(cfg.dim(), seed);
    let zero = vec![0.0; cfg.dim()];
    (0..steps)
        .map(|t| {
            let beta = schedule.beta_at(t)?;
            let eps = sample(cfg, &mut state)?;
            let action = compose_action(&zero, &eps, beta, space)?;
            Ok(NoiseStep { t, beta, eps, action })
        })
        .collect()
}
