//! Prediction/correction of the Gauss–Markov SU-to-PU low-pass channel.
//! Covariances are isotropic, so only the per-component variance is tracked.

use crate::error::{Error, Result};

/// Prediction through `g[n] = sqrt(ϱ) g[n-1] + sqrt(1-ϱ) d[n]`, where the
/// innovation has per-component variance `stationary_var`.
pub fn gm_predict(mean: [f64; 2], var: f64, rho: f64, stationary_var: f64) -> ([f64; 2], f64) {
    let s = rho.sqrt();
    ([s * mean[0], s * mean[1]], rho * var + (1.0 - rho) * stationary_var)
}

/// Correction with measurement `meas = g + v`, `v ~ N(0, noise_var · I₂)`.
pub fn kalman_correct(pred_mean: [f64; 2], pred_var: f64, meas: [f64; 2], noise_var: f64) -> Result<([f64; 2], f64)> {
    let total = pred_var + noise_var;
    if total <= 0.0 {
        if meas == pred_mean {
            return Ok((pred_mean, 0.0));
        }
        return Err(Error::KalmanInconsistent);
    }
    let mean = [
        (pred_var * meas[0] + noise_var * pred_mean[0]) / total,
        (pred_var * meas[1] + noise_var * pred_mean[1]) / total,
    ];
    Ok((mean, pred_var * noise_var / total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn prediction_limits() {
        assert_eq!(gm_predict([0.3, -0.2], 0.1, 1.0, 0.5), ([0.3, -0.2], 0.1));
        assert_eq!(gm_predict([0.3, -0.2], 0.1, 0.0, 0.5), ([0.0, 0.0], 0.5));
        let (m, v) = gm_predict([1.0, 0.0], 0.2, 0.81, 0.5);
        assert_relative_eq!(m[0], 0.9, epsilon = 1e-15);
        assert_relative_eq!(v, 0.257, epsilon = 1e-15);
    }

    #[test]
    fn correction_limits() {
        let (m, v) = kalman_correct([0.1, 0.2], 0.3, [1.0, -1.0], 0.0).unwrap();
        assert_eq!((m, v), ([1.0, -1.0], 0.0));
        let (m, v) = kalman_correct([0.0, 2.0], 0.4, [1.0, 0.0], 0.4).unwrap();
        assert_relative_eq!(m[0], 0.5);
        assert_relative_eq!(m[1], 1.0);
        assert_relative_eq!(v, 0.2);
    }

    #[test]
    fn zero_variances() {
        assert!(kalman_correct([1.0, 0.0], 0.0, [1.0, 0.0], 0.0).is_ok());
        assert!(matches!(
            kalman_correct([1.0, 0.0], 0.0, [0.5, 0.0], 0.0),
            Err(Error::KalmanInconsistent)
        ));
    }

    proptest! {
        #[test]
        fn posterior_variance_below_both(pv in 1e-6f64..10.0, nv in 1e-6f64..10.0, x in -5f64..5.0, y in -5f64..5.0) {
            let (m, v) = kalman_correct([0.0, 0.0], pv, [x, y], nv).unwrap();
            prop_assert!(v <= pv.min(nv) * (1.0 + 1e-12));
            // posterior mean lies between prior mean and measurement
            prop_assert!(m[0].abs() <= x.abs() + 1e-12 && m[0] * x >= 0.0);
        }

        #[test]
        fn variance_non_increasing_with_measurements(nv in 1e-3f64..5.0, count in 1usize..20) {
            let (mut mean, mut var) = ([0.0, 0.0], 0.5);
            let mut prev = var;
            for i in 0..count {
                let (pm, pv) = gm_predict(mean, var, 1.0, 0.5);
                let (m, v) = kalman_correct(pm, pv, [i as f64 * 0.1, 0.0], nv).unwrap();
                prop_assert!(v <= prev + 1e-15);
                prev = v;
                mean = m;
                var = v;
            }
        }
    }
}
