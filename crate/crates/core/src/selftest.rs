//! Release gate: runs every oracle suite and reports pass/fail per suite.

use crate::oracles::{
    kalman_vs_grid, power_vs_grid, quadrature_vs_mc, rate_derivatives_vs_fd, reference_optimizer, schedule_vs_lp,
    waterfilling_closed_form, OracleReport, PowerOptimizer,
};

/// Case counts for one selftest pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestSize {
    pub power_instances: usize,
    pub grid_points: usize,
    pub schedule_instances: usize,
    pub kalman_cases: usize,
    pub mc_samples: usize,
}

impl SelftestSize {
    pub fn full() -> Self {
        SelftestSize {
            power_instances: 1000,
            grid_points: 100_000,
            schedule_instances: 1000,
            kalman_cases: 100,
            mc_samples: 1_000_000,
        }
    }

    pub fn quick() -> Self {
        SelftestSize {
            power_instances: 200,
            grid_points: 100_000,
            schedule_instances: 1000,
            kalman_cases: 20,
            mc_samples: 1_000_000,
        }
    }
}

/// Runs all suites with the given optimizer under test.
pub fn run_with(size: SelftestSize, optimizer: PowerOptimizer) -> Vec<OracleReport> {
    vec![
        power_vs_grid(optimizer, size.power_instances, size.grid_points, 11),
        waterfilling_closed_form(size.power_instances, 12),
        schedule_vs_lp(size.schedule_instances, 13),
        kalman_vs_grid(size.kalman_cases, 14),
        quadrature_vs_mc(size.mc_samples, 15),
        rate_derivatives_vs_fd(),
    ]
}

pub fn run(quick: bool) -> Vec<OracleReport> {
    let size = if quick {
        SelftestSize::quick()
    } else {
        SelftestSize::full()
    };
    run_with(size, &reference_optimizer)
}

pub fn all_passed(reports: &[OracleReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
