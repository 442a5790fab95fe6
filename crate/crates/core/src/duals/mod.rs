//! Stochastic dual (sub)gradient tracking of the Lagrange multipliers.

mod calibrate;

use log::warn;
use rand::Rng;

pub use calibrate::{expected_subgradient, offline_dual_calibrate, offline_dual_calibrate_with, CalibrationOptions};

use crate::allocator::{Allocation, Multipliers};
use crate::beliefs::BeliefState;
use crate::config::{RateTarget, ScenarioConfig, Stepsizes};
use crate::model::pu_rate;

/// Upper bound imposed on every multiplier.
pub const MULTIPLIER_CLAMP: f64 = 1e6;

fn project(x: f64) -> f64 {
    if x > MULTIPLIER_CLAMP {
        warn!("multiplier clamped at {MULTIPLIER_CLAMP:e}");
        MULTIPLIER_CLAMP
    } else {
        x.max(0.0)
    }
}

/// π ← [π − η (p̌ − Σ_k w p)]₊
pub fn update_pi(pi: f64, eta: f64, budget: f64, served: f64) -> f64 {
    project(pi - eta * (budget - served))
}

/// θ ← [θ − η a (p̌_1 − Σ_m w h1 p)]₊
pub fn update_theta(theta: f64, eta: f64, a: f64, interference: f64, limit: f64) -> f64 {
    if a == 0.0 {
        return theta;
    }
    project(theta - eta * a * (limit - interference))
}

/// ρ ← [ρ + η a (ř − Σ_m w r1)]₊
pub fn update_rho(rho: f64, eta: f64, a: f64, served_rate: f64, target: f64) -> f64 {
    if a == 0.0 {
        return rho;
    }
    project(rho + eta * a * (target - served_rate))
}

/// Per-slot constraint slacks; every multiplier moves against its slack.
#[derive(Debug, Clone, PartialEq)]
pub struct Slacks {
    /// p̌^m − Σ_k w p.
    pub pi: Vec<f64>,
    /// E[a](p̌_1 − E[h1] p), zero when the scheme ignores it.
    pub theta: Vec<f64>,
    /// E[a](E[r1] − ř), zero when the scheme ignores it.
    pub rho: Vec<f64>,
}

impl Slacks {
    pub fn zeros(cfg: &ScenarioConfig) -> Self {
        Slacks {
            pi: vec![0.0; cfg.num_sus],
            theta: vec![0.0; cfg.num_channels],
            rho: vec![0.0; cfg.num_channels],
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &Slacks, w: f64) {
        for (a, b) in self.pi.iter_mut().zip(&other.pi) {
            *a += w * b;
        }
        for (a, b) in self.theta.iter_mut().zip(&other.theta) {
            *a += w * b;
        }
        for (a, b) in self.rho.iter_mut().zip(&other.rho) {
            *a += w * b;
        }
    }
}

/// Slacks of one slot under the slot's beliefs: a, h1·p and r1(h1 p) are
/// replaced by E[a], E[h1]·p and E[r1(h1 p)]. Point-mass beliefs give the
/// instantaneous values.
pub fn slot_slacks(beliefs: &BeliefState, alloc: &Allocation, cfg: &ScenarioConfig) -> Slacks {
    let served = alloc.served_power(cfg.num_sus);
    let pi = cfg.avg_power_budget.iter().zip(&served).map(|(b, s)| b - s).collect();
    let mut theta = vec![0.0; cfg.num_channels];
    let mut rho = vec![0.0; cfg.num_channels];
    for k in 0..cfg.num_channels {
        let q = beliefs.activity[k];
        let gamma = cfg.pu_snr[k];
        let winner = alloc.winner_link(k, cfg.num_sus);
        if cfg.scheme.long_term_interference() && cfg.max_interference[k].is_finite() {
            let interference = winner.map_or(0.0, |l| beliefs.sp_mean(l) * alloc.power[k]);
            theta[k] = q * (cfg.max_interference[k] - interference);
        }
        if cfg.scheme.long_term_capacity() {
            let rate = match winner {
                Some(l) if alloc.power[k] > 0.0 => {
                    let p = alloc.power[k];
                    beliefs.sp_law(l).expect(|h| pu_rate(gamma, h * p))
                }
                _ => pu_rate(gamma, 0.0),
            };
            rho[k] = match cfg.rate_target {
                RateTarget::Conditional => q * (rate - cfg.rate_target(k)),
                RateTarget::Unconditional => q * rate - cfg.rate_target(k),
            };
        }
    }
    Slacks { pi, theta, rho }
}

/// Multipliers plus stepsizes and iteration counter.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub lambda: Multipliers,
    pub stepsizes: Stepsizes,
    pub iteration: usize,
    /// Number of updates that hit [`MULTIPLIER_CLAMP`].
    pub clamp_hits: usize,
}

impl DualState {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Self::with_multipliers(cfg, Multipliers::for_config(cfg))
    }

    pub fn with_multipliers(cfg: &ScenarioConfig, lambda: Multipliers) -> Self {
        DualState {
            lambda,
            stepsizes: cfg.stepsizes,
            iteration: 0,
            clamp_hits: 0,
        }
    }

    /// One projected step against `slacks`, with stepsizes scaled by
    /// `factor` (the schedule, or 1).
    pub fn apply(&mut self, slacks: &Slacks, factor: f64, cfg: &ScenarioConfig) {
        let eta = &self.stepsizes;
        let mut hits = 0;
        let mut step = |x: &mut f64, eta: f64, s: f64| {
            *x = project(*x - eta * factor * s);
            if *x == MULTIPLIER_CLAMP {
                hits += 1;
            }
        };
        for (x, s) in self.lambda.pi.iter_mut().zip(&slacks.pi) {
            step(x, eta.pi, *s);
        }
        for k in 0..cfg.num_channels {
            if cfg.scheme.long_term_interference() {
                step(&mut self.lambda.theta[k], eta.theta, slacks.theta[k]);
            } else {
                self.lambda.theta[k] = 0.0;
            }
            if cfg.scheme.long_term_capacity() {
                step(&mut self.lambda.rho[k], eta.rho, slacks.rho[k]);
            } else {
                self.lambda.rho[k] = 0.0;
            }
        }
        self.clamp_hits += hits;
        self.iteration += 1;
    }
}

/// Stochastic update after one slot, with expectations over the beliefs.
pub fn update_all_with_belief(state: &mut DualState, beliefs: &BeliefState, alloc: &Allocation, cfg: &ScenarioConfig) {
    let slacks = slot_slacks(beliefs, alloc, cfg);
    let factor = state.stepsizes.factor(state.iteration);
    state.apply(&slacks, factor, cfg);
}

/// Fresh stationary CSI draw, independent of any running process.
pub(crate) fn draw_stationary<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> crate::model::CsiTrue {
    let mut st = crate::model::ModelState::stationary(cfg, rng);
    crate::model::step_channel(&mut st, cfg, rng)
}
