//! Shannon rates of the SU and PU links.

use std::f64::consts::LOG2_E;

/// SU rate `log2(1 + h p)` in bits/s/Hz.
#[inline]
pub fn su_rate(h: f64, p: f64) -> f64 {
    (h * p).ln_1p() * LOG2_E
}

/// d/dp of [`su_rate`].
#[inline]
pub fn su_rate_dp(h: f64, p: f64) -> f64 {
    LOG2_E * h / (1.0 + h * p)
}

/// PU rate `log2(1 + γ / (1 + x))` under interference power `x`.
#[inline]
pub fn pu_rate(gamma: f64, x: f64) -> f64 {
    (gamma / (1.0 + x)).ln_1p() * LOG2_E
}

/// d/dx of [`pu_rate`]; always nonpositive.
#[inline]
pub fn pu_rate_dx(gamma: f64, x: f64) -> f64 {
    -LOG2_E * gamma / ((1.0 + x) * (1.0 + gamma + x))
}
