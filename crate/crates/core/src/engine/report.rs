use serde::Serialize;

use super::metrics::Metrics;
use crate::config::ScenarioConfig;

/// Allowed excess over each limit before a constraint is flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative, on p̄_2^m.
    pub power: f64,
    /// Relative, on p̄_1.
    pub interference: f64,
    /// Absolute, on ε̄_1 (fraction, 0.005 = half a percentage point).
    pub capacity_loss: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            power: 0.02,
            interference: 0.05,
            capacity_loss: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub constraint: String,
    /// Whether the scheme enforces this constraint in the long term.
    pub targeted: bool,
    pub limit: f64,
    pub realized: Option<f64>,
    /// limit − realized.
    pub slack: Option<f64>,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub checks: Vec<ConstraintCheck>,
    pub feasible: bool,
}

impl FeasibilityReport {
    pub fn violations(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| c.violated)
    }
}

/// Checks every configured limit, whatever the scheme: per-SU power,
/// interference and capacity loss averaged across PUs.
pub fn feasibility_report(metrics: &Metrics, cfg: &ScenarioConfig, tol: &Tolerances) -> FeasibilityReport {
    let mut checks = Vec::new();
    for m in 0..cfg.num_sus {
        let limit = cfg.avg_power_budget[m];
        let realized = metrics.p2_avg(m);
        checks.push(ConstraintCheck {
            constraint: format!("power_su_{}", m + 1),
            targeted: true,
            limit,
            realized,
            slack: realized.map(|r| limit - r),
            violated: realized.is_some_and(|r| r > limit * (1.0 + tol.power)),
        });
    }
    let k_count = cfg.num_channels as f64;
    let p1_limit = cfg.max_interference.iter().sum::<f64>() / k_count;
    let p1 = metrics.p1_mean();
    checks.push(ConstraintCheck {
        constraint: "interference".into(),
        targeted: cfg.scheme.limits_interference(),
        limit: p1_limit,
        realized: p1,
        slack: p1.map(|r| p1_limit - r),
        violated: p1.is_some_and(|r| r > p1_limit * (1.0 + tol.interference)),
    });
    let eps_limit = cfg.max_capacity_loss.iter().sum::<f64>() / k_count;
    let eps = metrics.eps1_avg();
    checks.push(ConstraintCheck {
        constraint: "capacity_loss".into(),
        targeted: cfg.scheme.limits_capacity(),
        limit: eps_limit,
        realized: eps,
        slack: eps.map(|r| eps_limit - r),
        violated: eps.is_some_and(|r| r > eps_limit + tol.capacity_loss),
    });
    let feasible = !checks.iter().any(|c| c.violated);
    FeasibilityReport { checks, feasible }
}
