use std::f64::consts::LOG2_E;

use crate::beliefs::DiscreteLaw;
use crate::model::{pu_rate, pu_rate_dx};

/// Everything φ_k^m needs for one (channel, SU) pair. Perfect CSI is the
/// special case of single-node laws and `q ∈ {0, 1}`.
#[derive(Debug, Clone, Copy)]
pub struct LinkContext<'a> {
    pub beta: f64,
    pub pi: f64,
    pub theta: f64,
    pub rho: f64,
    /// E[a_{k,1}].
    pub q: f64,
    pub gamma: f64,
    /// Law of h_{k,2}^m.
    pub su: &'a DiscreteLaw,
    /// Law of h_{k,1}^m.
    pub sp: &'a DiscreteLaw,
    /// E[h_{k,1}^m].
    pub sp_mean: f64,
}

impl LinkContext<'_> {
    /// Slope of the linear part, π + θ·E[a]·E[h1].
    #[inline]
    pub fn linear_price(&self) -> f64 {
        self.pi + self.theta * self.q * self.sp_mean
    }

    /// Weight of the convex PU-rate term, ρ·E[a].
    #[inline]
    pub fn pu_weight(&self) -> f64 {
        self.rho * self.q
    }

    /// β·E[∂r2/∂p].
    #[inline]
    pub(crate) fn su_slope(&self, p: f64) -> f64 {
        self.beta * LOG2_E * self.su.expect(|h| h / (1.0 + h * p))
    }

    /// E[∂r1(γ, h1 p)/∂p].
    #[inline]
    pub(crate) fn pu_slope(&self, p: f64) -> f64 {
        self.sp.expect(|h| h * pu_rate_dx(self.gamma, h * p))
    }
}

/// φ(p) = β E[r2] − π p − θ E[a] E[h1] p + ρ E[a] E[r1(γ, h1 p)].
pub fn lqi(p: f64, ctx: &LinkContext) -> f64 {
    let su = ctx.beta * ctx.su.expect(|h| (h * p).ln_1p()) * LOG2_E;
    let w = ctx.pu_weight();
    let pu = if w == 0.0 {
        0.0
    } else {
        w * ctx.sp.expect(|h| pu_rate(ctx.gamma, h * p))
    };
    su - ctx.linear_price() * p + pu
}

/// dφ/dp.
pub fn lqi_derivative(p: f64, ctx: &LinkContext) -> f64 {
    let w = ctx.pu_weight();
    let pu = if w == 0.0 { 0.0 } else { w * ctx.pu_slope(p) };
    ctx.su_slope(p) - ctx.linear_price() + pu
}

/// Indicator of the virtual user: no power, no SU rate, full PU rate.
pub fn virtual_lqi(rho: f64, q: f64, gamma: f64) -> f64 {
    rho * q * pu_rate(gamma, 0.0)
}
