//! Per-slot resource allocation: peak caps, link-quality indicator, scalar
//! power optimization and winner-takes-all scheduling.

mod lqi;
mod peak;
mod power;
mod schedule;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use lqi::{lqi, lqi_derivative, virtual_lqi, LinkContext};
pub use peak::{peak_power, PeakCap, PeakInputs};
pub use power::{optimize_power, waterfilling, PowerSolution, BELIEF_GRID_POINTS, GRID_POINTS};
pub use schedule::schedule;

use crate::beliefs::BeliefState;
use crate::config::ScenarioConfig;
use crate::error::Result;

/// Dual variables: power prices π^m, interference prices θ_k and PU-rate
/// rewards ρ_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub pi: Vec<f64>,
    pub theta: Vec<f64>,
    pub rho: Vec<f64>,
}

impl Multipliers {
    pub fn zeros(num_sus: usize, num_channels: usize) -> Self {
        Multipliers {
            pi: vec![0.0; num_sus],
            theta: vec![0.0; num_channels],
            rho: vec![0.0; num_channels],
        }
    }

    pub fn for_config(cfg: &ScenarioConfig) -> Self {
        Self::zeros(cfg.num_sus, cfg.num_channels)
    }

    pub fn is_valid(&self) -> bool {
        self.pi
            .iter()
            .chain(&self.theta)
            .chain(&self.rho)
            .all(|x| x.is_finite() && *x >= 0.0)
    }
}

/// Decisions of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// Winner per channel; 0 is the virtual user, `m + 1` is SU `m`.
    pub winner: Vec<usize>,
    /// Transmit power on each channel (zero when the virtual user wins).
    pub power: Vec<f64>,
    /// φ_k^m at the optimal power, `k * (M + 1) + m` with m = 0 virtual.
    pub phi: Vec<f64>,
    /// Optimal power of every link, winner or not.
    pub link_power: Vec<f64>,
    /// Peak cap of every link.
    pub caps: Vec<f64>,
    /// Channels whose short-term rate demand cannot be met at any power.
    pub rate_infeasible: Vec<bool>,
}

impl Allocation {
    /// Link index of the winner on channel `k`, if a real SU won.
    pub fn winner_link(&self, k: usize, num_sus: usize) -> Option<usize> {
        match self.winner[k] {
            0 => None,
            m => Some(k * num_sus + m - 1),
        }
    }

    /// Power served by each SU, Σ_k w p.
    pub fn served_power(&self, num_sus: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_sus];
        for (k, &w) in self.winner.iter().enumerate() {
            if w > 0 {
                out[w - 1] += self.power[k];
            }
        }
        out
    }
}

struct ChannelDecision {
    winner: usize,
    power: f64,
    phi: Vec<f64>,
    link_power: Vec<f64>,
    caps: Vec<f64>,
    rate_infeasible: bool,
}

/// Multipliers that the configured scheme actually uses.
fn effective(cfg: &ScenarioConfig, lambda: &Multipliers, k: usize) -> (f64, f64) {
    let theta = if cfg.scheme.long_term_interference() {
        lambda.theta[k]
    } else {
        0.0
    };
    let rho = if cfg.scheme.long_term_capacity() {
        lambda.rho[k]
    } else {
        0.0
    };
    (theta, rho)
}

fn allocate_channel(
    beliefs: &BeliefState,
    lambda: &Multipliers,
    cfg: &ScenarioConfig,
    k: usize,
) -> Result<ChannelDecision> {
    let m_count = cfg.num_sus;
    let (theta, rho) = effective(cfg, lambda, k);
    let q = beliefs.activity[k];
    let gamma = cfg.pu_snr[k];
    let phi0 = virtual_lqi(rho, q, gamma);
    let mut phi = Vec::with_capacity(m_count + 1);
    phi.push(phi0);
    let mut link_power = Vec::with_capacity(m_count);
    let mut caps = Vec::with_capacity(m_count);
    let mut rate_infeasible = false;
    for m in 0..m_count {
        let l = cfg.idx(k, m);
        let peak = peak_power(&PeakInputs {
            q,
            sp_law: beliefs.sp_law(l),
            sp_mean: beliefs.sp_mean(l),
            gamma,
            max_interference: cfg.max_interference[k],
            rate_target: cfg.short_term_rate_target(k),
            amplifier_cap: cfg.amplifier_cap[l],
            use_interference_cap: cfg.scheme.short_term_interference(),
            use_rate_cap: cfg.scheme.short_term_capacity(),
        });
        rate_infeasible |= peak.rate_infeasible;
        let ctx = LinkContext {
            beta: cfg.priority[m],
            pi: lambda.pi[m],
            theta,
            rho,
            q,
            gamma,
            su: beliefs.su_law(l),
            sp: beliefs.sp_law(l),
            sp_mean: beliefs.sp_mean(l),
        };
        let sol = optimize_power(&ctx, peak.cap)?;
        phi.push(sol.value);
        link_power.push(sol.power);
        caps.push(peak.cap);
    }
    let winner = schedule(&phi, &link_power);
    let power = if winner == 0 { 0.0 } else { link_power[winner - 1] };
    Ok(ChannelDecision {
        winner,
        power,
        phi,
        link_power,
        caps,
        rate_infeasible,
    })
}

/// Optimal allocation for one slot given beliefs and multipliers. Channels
/// are independent; large belief laws are processed in parallel.
pub fn allocate_slot(beliefs: &BeliefState, lambda: &Multipliers, cfg: &ScenarioConfig) -> Result<Allocation> {
    let heavy = !beliefs.is_deterministic() && rayon::current_num_threads() > 1;
    let decisions: Vec<ChannelDecision> = if heavy {
        (0..cfg.num_channels)
            .into_par_iter()
            .map(|k| allocate_channel(beliefs, lambda, cfg, k))
            .collect::<Result<_>>()?
    } else {
        (0..cfg.num_channels)
            .map(|k| allocate_channel(beliefs, lambda, cfg, k))
            .collect::<Result<_>>()?
    };
    let mut out = Allocation {
        winner: Vec::with_capacity(cfg.num_channels),
        power: Vec::with_capacity(cfg.num_channels),
        phi: Vec::with_capacity(cfg.num_channels * (cfg.num_sus + 1)),
        link_power: Vec::with_capacity(cfg.num_links()),
        caps: Vec::with_capacity(cfg.num_links()),
        rate_infeasible: Vec::with_capacity(cfg.num_channels),
    };
    for d in decisions {
        out.winner.push(d.winner);
        out.power.push(d.power);
        out.phi.extend(d.phi);
        out.link_power.extend(d.link_power);
        out.caps.extend(d.caps);
        out.rate_infeasible.push(d.rate_infeasible);
    }
    Ok(out)
}
