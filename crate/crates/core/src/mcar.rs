//! Continuous Mountain-Car and the noise-only calibration harness.

use rand::Rng as _;
use serde::Serialize;

use crate::coverage::Dataset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::noise::{compose_action, sample, ActionSpace, NoiseConfig, NoiseState};
use crate::rng::{self, Rng};

pub const MIN_POSITION: f64 = -1.2;
pub const MAX_POSITION: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const GOAL_POSITION: f64 = 0.45;
pub const POWER: f64 = 0.0015;
pub const GRAVITY: f64 = 0.0025;
pub const HORIZON: usize = 999;
pub const GOAL_REWARD: f64 = 100.0;
pub const ACTION_COST: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McState {
    pub position: f64,
    pub velocity: f64,
}

impl McState {
    pub fn new(position: f64, velocity: f64) -> Result<Self> {
        if !(MIN_POSITION..=MAX_POSITION).contains(&position) || !(-MAX_SPEED..=MAX_SPEED).contains(&velocity) {
            return Err(Error::Range(format!("state ({position}, {velocity}) outside the environment limits")));
        }
        Ok(McState { position, velocity })
    }
}

pub fn mc_reset(rng: &mut Rng) -> McState {
    McState { position: rng.random_range(-0.6..=-0.4), velocity: 0.0 }
}

/// One transition. `done` is set when the goal is reached; the horizon is left to the caller.
pub fn mc_step(s: McState, a: f64) -> Result<(McState, f64, bool)> {
    if !a.is_finite() || !(-1.0..=1.0).contains(&a) {
        return Err(Error::Input(format!("action must be finite and within [-1, 1], got {a}")));
    }
    let mut v = (s.velocity + POWER * a - GRAVITY * (3.0 * s.position).cos()).clamp(-MAX_SPEED, MAX_SPEED);
    let x = (s.position + v).clamp(MIN_POSITION, MAX_POSITION);
    if x == MIN_POSITION && v < 0.0 {
        v = 0.0;
    }
    let done = x >= GOAL_POSITION;
    let mut reward = -ACTION_COST * a * a;
    if done {
        reward += GOAL_REWARD;
    }
    Ok((McState { position: x, velocity: v }, reward, done))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub total_return: f64,
    pub steps: usize,
    pub reached_goal: bool,
    /// Start state followed by every successor state, when recording was requested.
    pub visited_states: Option<Dataset>,
}

/// Runs the noise-only policy (zero action, beta = 1) for one episode.
pub fn run_episode(
    cfg: &NoiseConfig,
    noise: &mut NoiseState,
    env_rng: &mut Rng,
    record_states: bool,
) -> Result<EpisodeResult> {
    run_episode_limited(cfg, noise, env_rng, record_states, HORIZON).map(|(ep, _)| ep)
}

/// Returns the episode and whether it finished (goal or horizon) within `max_steps`.
fn run_episode_limited(
    cfg: &NoiseConfig,
    noise: &mut NoiseState,
    env_rng: &mut Rng,
    record_states: bool,
    max_steps: usize,
) -> Result<(EpisodeResult, bool)> {
    let space = ActionSpace::symmetric(1);
    let mut s = mc_reset(env_rng);
    let mut states = Vec::new();
    if record_states {
        states.extend([s.position, s.velocity]);
    }
    let (mut total, mut steps, mut goal) = (0.0, 0, false);
    while steps < HORIZON.min(max_steps) {
        let eps = sample(cfg, noise)?;
        let a = compose_action(&[0.0], &eps, 1.0, &space)?[0];
        let (next, r, done) = mc_step(s, a)?;
        s = next;
        total += r;
        steps += 1;
        if record_states {
            states.extend([s.position, s.velocity]);
        }
        if done {
            goal = true;
            break;
        }
    }
    let complete = goal || steps == HORIZON;
    let visited_states = if record_states { Some(Dataset::from_flat(states, 2)?) } else { None };
    Ok((EpisodeResult { total_return: total, steps, reached_goal: goal, visited_states }, complete))
}

/// Rollout protocol for [`calibrate`].
///
/// Episodes are collected in blocks. Each block owns one noise process and runs
/// until `block_episodes` episodes or `block_steps` environment steps, whichever
/// comes first; an episode cut off by the step budget is discarded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationOptions {
    pub block_episodes: usize,
    pub block_steps: usize,
    /// Restart the noise process (OU state back to zero) at each episode start.
    pub reset_noise_each_episode: bool,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions { block_episodes: 100, block_steps: 10_000, reset_noise_each_episode: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub episodes: usize,
    pub mean_return: f64,
    /// Sample sd of the per-episode returns.
    pub sd_episode: f64,
    /// Sample sd of per-block mean returns; NaN with a single block.
    pub sd_block: f64,
    /// `sd_episode / sqrt(episodes)`.
    pub se_mean: f64,
    pub goal_rate: f64,
    pub blocks: usize,
}

struct Block {
    returns: Vec<f64>,
    goals: Vec<bool>,
}

fn run_block(cfg: &NoiseConfig, opts: &CalibrationOptions, seed: u64, index: u64) -> Result<Block> {
    let mut env_rng = rng::seeded(rng::derive_seed(seed, &[index, 0]));
    let mut noise = NoiseState::new(cfg.dim(), rng::derive_seed(seed, &[index, 1]));
    let mut block = Block { returns: Vec::new(), goals: Vec::new() };
    let mut budget = opts.block_steps;
    while block.returns.len() < opts.block_episodes && budget > 0 {
        if opts.reset_noise_each_episode {
            noise.reset();
        }
        let (ep, complete) = run_episode_limited(cfg, &mut noise, &mut env_rng, false, budget)?;
        budget -= ep.steps;
        if !complete {
            break;
        }
        block.returns.push(ep.total_return);
        block.goals.push(ep.reached_goal);
    }
    Ok(block)
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    (m, (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}

/// Mean return of the noise-only policy over the first `episodes` complete episodes,
/// ordered by block index and then by episode within the block.
pub fn calibrate(
    cfg: &NoiseConfig,
    episodes: usize,
    seed: u64,
    opts: &CalibrationOptions,
    exec: Execution,
) -> Result<Calibration> {
    cfg.validate()?;
    if cfg.dim() != 1 {
        return Err(Error::Config("mountain car has a one-dimensional action".into()));
    }
    if episodes == 0 {
        return Err(Error::Input("episodes must be at least 1".into()));
    }
    if opts.block_episodes == 0 || opts.block_steps < HORIZON {
        return Err(Error::Config(format!(
            "blocks need at least one episode and {HORIZON} steps to complete an episode"
        )));
    }
    let per_block = opts.block_episodes.min(opts.block_steps / HORIZON);
    let mut blocks: Vec<Block> = Vec::new();
    let mut collected = 0;
    while collected < episodes {
        let start = blocks.len();
        let batch = (episodes - collected).div_ceil(per_block);
        let new = exec.try_map_indexed(batch, |i| run_block(cfg, opts, seed, (start + i) as u64))?;
        collected += new.iter().map(|b| b.returns.len()).sum::<usize>();
        blocks.extend(new);
    }

    let mut returns = Vec::with_capacity(episodes);
    let mut goals = 0usize;
    let mut block_means = Vec::new();
    for b in &blocks {
        let take = (episodes - returns.len()).min(b.returns.len());
        if take == 0 {
            break;
        }
        returns.extend_from_slice(&b.returns[..take]);
        goals += b.goals[..take].iter().filter(|&&g| g).count();
        block_means.push(mean_sd(&b.returns[..take]).0);
    }
    let (mean, sd) = mean_sd(&returns);
    let sd = if returns.len() < 2 { 0.0 } else { sd };
    Ok(Calibration {
        episodes,
        mean_return: mean,
        sd_episode: sd,
        sd_block: mean_sd(&block_means).1,
        se_mean: sd / (episodes as f64).sqrt(),
        goal_rate: goals as f64 / episodes as f64,
        blocks: block_means.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn valley_bottom_is_at_rest() {
        let s = McState { position: -std::f64::consts::PI / 6.0, velocity: 0.0 };
        let (n, r, done) = mc_step(s, 0.0).unwrap();
        assert!(n.velocity.abs() < 1e-15);
        assert_eq!(r, 0.0);
        assert!(!done);
    }

    #[test]
    fn goal_step() {
        let (n, r, done) = mc_step(McState { position: 0.44, velocity: 0.07 }, 1.0).unwrap();
        assert!(done);
        assert!(n.position >= GOAL_POSITION);
        assert_relative_eq!(r, 99.9, epsilon = 1e-12);
    }

    #[test]
    fn left_wall_stops_motion() {
        let (n, _, _) = mc_step(McState { position: -1.19, velocity: -0.07 }, -1.0).unwrap();
        assert_eq!(n.position, MIN_POSITION);
        assert_eq!(n.velocity, 0.0);
    }

    #[test]
    fn rejects_bad_actions() {
        let s = McState { position: -0.5, velocity: 0.0 };
        assert!(mc_step(s, f64::NAN).is_err());
        assert!(mc_step(s, 1.5).is_err());
        assert!(McState::new(0.7, 0.0).is_err());
    }

    #[test]
    fn reset_distribution() {
        let mut r = rng::seeded(9);
        let mut xs: Vec<f64> = (0..10_000).map(|_| mc_reset(&mut r)).inspect(|s| assert_eq!(s.velocity, 0.0)).map(|s| s.position).collect();
        assert!(xs.iter().all(|x| (-0.6..=-0.4).contains(x)));
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = (x + 0.6) / 0.2;
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "ks {ks}");
        assert_eq!(mc_reset(&mut rng::seeded(4)), mc_reset(&mut rng::seeded(4)));
    }

    #[test]
    fn zero_action_episode_returns_zero() {
        let cfg = NoiseConfig::gaussian(0.0, 1);
        let ep = run_episode(&cfg, &mut NoiseState::new(1, 1), &mut rng::seeded(2), true).unwrap();
        assert_eq!(ep.total_return, 0.0);
        assert_eq!(ep.steps, HORIZON);
        assert!(!ep.reached_goal);
        assert_eq!(ep.visited_states.unwrap().len(), HORIZON + 1);
        let c = calibrate(&cfg, 50, 3, &CalibrationOptions::default(), Execution::Sequential).unwrap();
        assert_eq!(c.mean_return, 0.0);
        assert_eq!(c.goal_rate, 0.0);
    }

    #[test]
    fn visited_states_stay_in_limits() {
        let cfg = NoiseConfig::ornstein_uhlenbeck(1.7, 1);
        let ep = run_episode(&cfg, &mut NoiseState::new(1, 5), &mut rng::seeded(6), true).unwrap();
        for row in ep.visited_states.as_ref().unwrap().rows() {
            assert!((MIN_POSITION..=MAX_POSITION).contains(&row[0]));
            assert!((-MAX_SPEED..=MAX_SPEED).contains(&row[1]));
        }
        assert!(ep.total_return <= GOAL_REWARD);
        if !ep.reached_goal {
            assert!(ep.total_return <= 0.0);
        }
    }

    /// `E[clip(sigma xi, -1, 1)^2]` by Simpson quadrature over the unclipped part.
    fn clipped_second_moment(sigma: f64) -> f64 {
        let b = 1.0 / sigma;
        let m = 20_000;
        let h = 2.0 * b / m as f64;
        let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let inner: f64 = (0..=m)
            .map(|i| {
                let z = -b + i as f64 * h;
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * sigma * sigma * z * z * phi(z)
            })
            .sum::<f64>()
            * h
            / 3.0;
        let tail = statrs::function::erf::erfc(b / std::f64::consts::SQRT_2);
        inner + tail
    }

    #[test]
    fn gaussian_return_matches_quadrature() {
        let expected = -ACTION_COST * HORIZON as f64 * clipped_second_moment(0.6);
        let c = calibrate(&NoiseConfig::gaussian(0.6, 1), 2000, 11, &CalibrationOptions::default(), Execution::Parallel)
            .unwrap();
        assert!(c.goal_rate < 0.01);
        assert!(((c.mean_return - expected) / expected).abs() < 0.02, "{} vs {expected}", c.mean_return);
    }

    #[test]
    fn calibration_is_deterministic_across_strategies() {
        let cfg = NoiseConfig::ornstein_uhlenbeck(0.9, 1);
        let opts = CalibrationOptions::default();
        let a = calibrate(&cfg, 37, 8, &opts, Execution::Sequential).unwrap();
        let b = calibrate(&cfg, 37, 8, &opts, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.episodes, 37);
        let c = calibrate(&cfg, 37, 9, &opts, Execution::Parallel).unwrap();
        assert_ne!(a.mean_return, c.mean_return);
    }

    #[test]
    fn rejects_bad_protocol() {
        let cfg = NoiseConfig::gaussian(0.5, 1);
        let bad = CalibrationOptions { block_steps: 10, ..Default::default() };
        assert!(calibrate(&cfg, 10, 1, &bad, Execution::Sequential).is_err());
        assert!(calibrate(&NoiseConfig::gaussian(0.5, 2), 10, 1, &Default::default(), Execution::Sequential).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn step_stays_in_limits(x in MIN_POSITION..=MAX_POSITION, v in -MAX_SPEED..=MAX_SPEED, a in -1.0f64..=1.0) {
            let (n, r, done) = mc_step(McState { position: x, velocity: v }, a).unwrap();
            prop_assert!((MIN_POSITION..=MAX_POSITION).contains(&n.position));
            prop_assert!((-MAX_SPEED..=MAX_SPEED).contains(&n.velocity));
            prop_assert!(r <= GOAL_REWARD);
            prop_assert_eq!(done, n.position >= GOAL_POSITION);
        }
    }
}
