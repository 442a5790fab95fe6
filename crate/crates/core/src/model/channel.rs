//! Ground-truth CSI processes.
//!
//! * PU activity follows the configured two-state chain (or i.i.d. draws).
//! * SU-to-PU low-pass channels follow a first-order Gauss–Markov model
//!   `g[n] = sqrt(ϱ) g[n-1] + sqrt(1-ϱ) d[n]`, with the innovation scaled so
//!   that `E‖g‖² = h̄_{k,1}^m`.
//! * SU-to-AP gains are i.i.d. exponential across slots, channels and users.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::config::{ActivityModel, ScenarioConfig};

/// True CSI of one slot. Per-link vectors are channel-major (`k * M + m`).
#[derive(Debug, Clone, PartialEq)]
pub struct CsiTrue {
    pub slot: usize,
    /// a_{k,1}: PU active on channel k.
    pub active: Vec<bool>,
    /// g_{k,1}^m as (real, imag).
    pub sp_lowpass: Vec<[f64; 2]>,
    /// h_{k,1}^m = ‖g‖².
    pub sp_gain: Vec<f64>,
    /// h_{k,2}^m.
    pub su_gain: Vec<f64>,
}

/// Memory of the channel processes between slots.
#[derive(Debug, Clone)]
pub struct ModelState {
    next_slot: usize,
    active: Vec<bool>,
    lowpass: Vec<[f64; 2]>,
}

impl ModelState {
    /// Draws the initial state from the stationary laws.
    pub fn stationary<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Self {
        let p1 = cfg.activity.stationary_active();
        let active = (0..cfg.num_channels).map(|_| rng.random::<f64>() < p1).collect();
        let lowpass = cfg
            .avg_gain_sp
            .iter()
            .map(|&h| {
                let sd = (h / 2.0).sqrt();
                [
                    sd * rng.sample::<f64, _>(StandardNormal),
                    sd * rng.sample::<f64, _>(StandardNormal),
                ]
            })
            .collect();
        ModelState {
            next_slot: 0,
            active,
            lowpass,
        }
    }

    pub fn next_slot(&self) -> usize {
        self.next_slot
    }
}

fn next_activity<R: Rng + ?Sized>(model: &ActivityModel, prev: bool, rng: &mut R) -> bool {
    let (stay_active, become_active) = model.transition_to_active();
    let p = if prev { stay_active } else { become_active };
    rng.random::<f64>() < p
}

/// Advances every process by one slot and returns the new true CSI.
pub fn step_channel<R: Rng + ?Sized>(state: &mut ModelState, cfg: &ScenarioConfig, rng: &mut R) -> CsiTrue {
    for a in state.active.iter_mut() {
        *a = next_activity(&cfg.activity, *a, rng);
    }
    for (l, g) in state.lowpass.iter_mut().enumerate() {
        let rho = cfg.sp_correlation[l];
        let innov_sd = ((1.0 - rho) * cfg.avg_gain_sp[l] / 2.0).sqrt();
        let keep = rho.sqrt();
        for c in g.iter_mut() {
            let d: f64 = rng.sample(StandardNormal);
            *c = keep * *c + innov_sd * d;
        }
    }
    let su_gain = cfg
        .avg_gain_su
        .iter()
        .map(|&mean| mean * rng.sample::<f64, _>(Exp1))
        .collect();
    let sp_gain = state.lowpass.iter().map(|g| g[0] * g[0] + g[1] * g[1]).collect();
    let slot = state.next_slot;
    state.next_slot += 1;
    CsiTrue {
        slot,
        active: state.active.clone(),
        sp_lowpass: state.lowpass.clone(),
        sp_gain,
        su_gain,
    }
}
