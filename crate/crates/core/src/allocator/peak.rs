use std::f64::consts::LN_2;

use log::warn;

use crate::beliefs::DiscreteLaw;
use crate::model::pu_rate;

/// Inputs of the short-term peak cap for one link.
#[derive(Debug, Clone, Copy)]
pub struct PeakInputs<'a> {
    /// E[a_{k,1}].
    pub q: f64,
    pub sp_law: &'a DiscreteLaw,
    pub sp_mean: f64,
    pub gamma: f64,
    /// p̌_{k,1}.
    pub max_interference: f64,
    /// ř_{k,1}.
    pub rate_target: f64,
    /// p̌_{k,max}^m.
    pub amplifier_cap: f64,
    pub use_interference_cap: bool,
    pub use_rate_cap: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakCap {
    pub cap: f64,
    /// The rate demand exceeds the interference-free PU rate.
    pub rate_infeasible: bool,
}

/// Peak power min{x, y, p̌_max} implied by the enforced short-term
/// constraints. The activity probability multiplies both sides of each
/// constraint, so it only matters whether it is zero.
pub fn peak_power(inp: &PeakInputs) -> PeakCap {
    let amp = inp.amplifier_cap;
    if inp.q <= 0.0 || !(inp.use_interference_cap || inp.use_rate_cap) {
        return PeakCap {
            cap: amp,
            rate_infeasible: false,
        };
    }
    let mut cap = amp;
    if inp.use_interference_cap && inp.sp_mean > 0.0 {
        cap = cap.min(inp.max_interference / inp.sp_mean);
    }
    let mut rate_infeasible = false;
    if inp.use_rate_cap {
        let full = pu_rate(inp.gamma, 0.0);
        if inp.rate_target > full {
            warn!(
                "rate target {:.4} exceeds interference-free PU rate {:.4}; link silenced",
                inp.rate_target, full
            );
            rate_infeasible = true;
            cap = 0.0;
        } else {
            cap = cap.min(rate_cap(inp));
        }
    }
    PeakCap { cap, rate_infeasible }
}

/// Largest p ≤ p̌_max with E[r1(γ, h1 p)] ≥ ř.
fn rate_cap(inp: &PeakInputs) -> f64 {
    if let Some(h) = inp.sp_law.as_point() {
        if h <= 0.0 {
            return inp.amplifier_cap;
        }
        // r1(γ, h y) = ř  ⇔  y = (γ / (2^ř − 1) − 1) / h
        let y = (inp.gamma / (inp.rate_target * LN_2).exp_m1() - 1.0) / h;
        return y.max(0.0);
    }
    let served = |p: f64| inp.sp_law.expect(|h| pu_rate(inp.gamma, h * p));
    let (mut lo, mut hi) = (0.0, inp.amplifier_cap);
    if served(hi) >= inp.rate_target {
        return hi;
    }
    if served(lo) < inp.rate_target {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if served(mid) >= inp.rate_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
