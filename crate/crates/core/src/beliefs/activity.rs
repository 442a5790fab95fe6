use crate::error::{Error, Result};

/// Pr{a = 1 | ã} for a binary detector with false-alarm probability `p_fa`
/// and miss-detection probability `p_md`, given prior probabilities `p0`
/// (idle) and `p1` (active).
pub fn activity_posterior(detected: bool, p_fa: f64, p_md: f64, p0: f64, p1: f64) -> Result<f64> {
    if detected {
        let num = (1.0 - p_md) * p1;
        let den = p_fa * p0 + num;
        if den <= 0.0 {
            return Err(Error::InconsistentSensing(
                "detector reported activity with zero probability".into(),
            ));
        }
        Ok(num / den)
    } else {
        let num = (1.0 - p_fa) * p0;
        let den = num + p_md * p1;
        if den <= 0.0 {
            return Err(Error::InconsistentSensing(
                "detector reported idle with zero probability".into(),
            ));
        }
        Ok(1.0 - num / den)
    }
}

/// One-step propagation of the activity probability through the chain,
/// `q' = q·p11 + (1 - q)·p01`.
pub fn stale_activity_update(q_prev: f64, p11: f64, p01: f64) -> f64 {
    q_prev * p11 + (1.0 - q_prev) * p01
}
