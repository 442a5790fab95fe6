//! Offline dual ascent with Monte-Carlo estimates of the constraint
//! expectations, used to warm-start the stochastic iterations.

use rand::{Rng, SeedableRng};

use super::{draw_stationary, project, slot_slacks, Slacks};
use crate::allocator::{allocate_slot, Multipliers};
use crate::beliefs::BeliefState;
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::model::SimRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub mc_samples: usize,
    pub iters: usize,
    /// Initial stepsize; iteration t uses `eta0 / sqrt(t)`.
    pub eta0: f64,
    pub seed: u64,
}

impl CalibrationOptions {
    pub fn new(cfg: &ScenarioConfig, mc_samples: usize, iters: usize) -> Self {
        CalibrationOptions {
            mc_samples,
            iters,
            eta0: 0.5,
            seed: cfg.seed,
        }
    }
}

/// Mean slacks over `samples` fresh stationary CSI draws at fixed
/// multipliers, with perfect CSI.
pub fn expected_subgradient<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    lambda: &Multipliers,
    samples: usize,
    rng: &mut R,
) -> Result<Slacks> {
    let mut acc = Slacks::zeros(cfg);
    let w = 1.0 / samples.max(1) as f64;
    for _ in 0..samples {
        let truth = draw_stationary(cfg, rng);
        let beliefs = BeliefState::point_masses(&truth);
        let alloc = allocate_slot(&beliefs, lambda, cfg)?;
        acc.add_scaled(&slot_slacks(&beliefs, &alloc, cfg), w);
    }
    Ok(acc)
}

/// Dual ascent with `iters` steps of MC-estimated subgradients.
pub fn offline_dual_calibrate(cfg: &ScenarioConfig, mc_samples: usize, iters: usize) -> Result<Multipliers> {
    offline_dual_calibrate_with(cfg, &CalibrationOptions::new(cfg, mc_samples, iters), |_, _| {})
}

/// As [`offline_dual_calibrate`], reporting every iterate and its slacks to
/// `monitor`. Slacks are normalized by their limits so one stepsize fits
/// every constraint, then clipped to `[-1, 1]`: from λ = 0 the raw
/// violations are tens of limits wide and would throw the first iterate far
/// past the optimum.
pub fn offline_dual_calibrate_with(
    cfg: &ScenarioConfig,
    opts: &CalibrationOptions,
    mut monitor: impl FnMut(&Multipliers, &Slacks),
) -> Result<Multipliers> {
    let mut rng = SimRng::seed_from_u64(opts.seed);
    rng.set_stream(7);
    let mut lambda = Multipliers::for_config(cfg);
    for t in 1..=opts.iters {
        let s = expected_subgradient(cfg, &lambda, opts.mc_samples, &mut rng)?;
        monitor(&lambda, &s);
        let eta = opts.eta0 / (t as f64).sqrt();
        for (m, x) in lambda.pi.iter_mut().enumerate() {
            *x = project(*x - eta * clip(s.pi[m] / cfg.avg_power_budget[m]));
        }
        for k in 0..cfg.num_channels {
            if cfg.scheme.long_term_interference() && cfg.max_interference[k].is_finite() {
                lambda.theta[k] = project(lambda.theta[k] - eta * clip(s.theta[k] / cfg.max_interference[k]));
            }
            if cfg.scheme.long_term_capacity() {
                lambda.rho[k] = project(lambda.rho[k] - eta * clip(s.rho[k] / cfg.rate_target(k)));
            }
        }
    }
    Ok(lambda)
}

fn clip(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}
