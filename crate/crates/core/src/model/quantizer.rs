//! Scalar quantizer of exponentially distributed gains.

/// Regions `[τ_{l-1}, τ_l)` with `τ_0 = 0` and `τ_L = ∞`; indices run over `0..levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    thresholds: Vec<f64>,
    mean: f64,
}

impl Quantizer {
    /// Equi-probable regions for an exponential gain with the given mean.
    pub fn equiprobable(levels: usize, mean: f64) -> Self {
        assert!(levels >= 1);
        let thresholds = (1..levels)
            .map(|l| -mean * (1.0 - l as f64 / levels as f64).ln())
            .collect();
        Quantizer { thresholds, mean }
    }

    /// Thresholds given relative to the mean gain.
    pub fn from_relative(relative: &[f64], mean: f64) -> Self {
        Quantizer {
            thresholds: relative.iter().map(|t| t * mean).collect(),
            mean,
        }
    }

    pub fn levels(&self) -> usize {
        self.thresholds.len() + 1
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn region(&self, h: f64) -> usize {
        self.thresholds.partition_point(|t| *t <= h)
    }

    pub fn bounds(&self, region: usize) -> (f64, f64) {
        let lo = if region == 0 { 0.0 } else { self.thresholds[region - 1] };
        let hi = self.thresholds.get(region).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    /// Conditional mean of the gain inside a region.
    pub fn region_mean(&self, region: usize) -> f64 {
        let (lo, hi) = self.bounds(region);
        truncated_exp_mean(lo, hi, self.mean)
    }
}

/// Mean of an exponential law (mean `mean`) restricted to `[lo, hi)`.
pub fn truncated_exp_mean(lo: f64, hi: f64, mean: f64) -> f64 {
    if hi.is_infinite() {
        return lo + mean;
    }
    let w = (hi - lo) / mean;
    if w < 1e-6 {
        return 0.5 * (lo + hi);
    }
    let tail = -(-w).exp_m1();
    lo + mean * (tail - w * (-w).exp()) / tail
}
