//! Action noise, noise schedules and state-space coverage measures for
//! exploration studies in continuous-control reinforcement learning.
//!
//! The crate provides Gaussian and Ornstein-Uhlenbeck action noise with
//! impact schedules, coverage measures including a uniform-relative-entropy
//! measure backed by kNN and nearest-neighbour-ratio divergence estimators, a
//! synthetic benchmark for those measures, the statistics used to analyse
//! exploration experiments, and a Mountain-Car calibration harness.

pub mod coverage;
pub mod error;
pub mod exec;
pub mod knn;
pub mod mcar;
pub mod noise;
pub mod rng;
pub mod schedule;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;
