//! Schedulers for the noise impact factor `beta`.
//!
//! The schedulers never touch the noise scale; they scale the sampled noise
//! after the fact so the shape of the noise distribution is preserved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_STEEPNESS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    Linear,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    pub total_steps: usize,
    /// Logistic steepness; unused by the other kinds.
    pub steepness: f64,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl ScheduleSpec {
    pub fn new(kind: ScheduleKind, total_steps: usize) -> Result<Self> {
        Self::with_steepness(kind, total_steps, DEFAULT_STEEPNESS)
    }

    pub fn with_steepness(kind: ScheduleKind, total_steps: usize, steepness: f64) -> Result<Self> {
        if total_steps == 0 {
            return Err(Error::Config("schedule horizon must be at least 1 step".into()));
        }
        if !(steepness.is_finite() && steepness > 0.0) {
            return Err(Error::Config(format!("steepness must be > 0, got {steepness}")));
        }
        Ok(ScheduleSpec { kind, total_steps, steepness })
    }

    /// Impact factor at step `t`, `0 <= t <= total_steps`.
    pub fn beta_at(&self, t: usize) -> Result<f64> {
        if t > self.total_steps {
            return Err(Error::Range(format!("step {t} beyond schedule horizon {}", self.total_steps)));
        }
        let frac = t as f64 / self.total_steps as f64;
        let beta = match self.kind {
            ScheduleKind::Constant => 1.0,
            ScheduleKind::Linear => 1.0 - frac,
            ScheduleKind::Logistic => {
                // Min-max normalised so beta(0) = 1 and beta(T) = 0 exactly.
                if t == 0 {
                    1.0
                } else if t == self.total_steps {
                    0.0
                } else {
                    let k = self.steepness;
                    let lo = logistic(-k / 2.0);
                    let hi = logistic(k / 2.0);
                    (logistic(k * (0.5 - frac)) - lo) / (hi - lo)
                }
            }
        };
        Ok(beta.clamp(0.0, 1.0))
    }
}
