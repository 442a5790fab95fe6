use serde::Serialize;

use crate::allocator::Allocation;
use crate::config::ScenarioConfig;
use crate::model::{pu_rate, su_rate, CsiTrue};

/// Sample averages of the realized allocation, judged on the true CSI.
/// PU-side quantities are accumulated over active slots only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub slots: usize,
    c2_sum: f64,
    p2_sum: Vec<f64>,
    p1_sum: Vec<f64>,
    r1_sum: Vec<f64>,
    pub active_slots: Vec<usize>,
    full_rate: Vec<f64>,
}

impl Metrics {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Metrics {
            slots: 0,
            c2_sum: 0.0,
            p2_sum: vec![0.0; cfg.num_sus],
            p1_sum: vec![0.0; cfg.num_channels],
            r1_sum: vec![0.0; cfg.num_channels],
            active_slots: vec![0; cfg.num_channels],
            full_rate: (0..cfg.num_channels).map(|k| cfg.pu_full_rate(k)).collect(),
        }
    }

    /// Accumulates one slot.
    pub fn record(&mut self, truth: &CsiTrue, alloc: &Allocation, cfg: &ScenarioConfig) {
        self.slots += 1;
        for k in 0..cfg.num_channels {
            let p = alloc.power[k];
            let link = alloc.winner_link(k, cfg.num_sus);
            if let Some(l) = link {
                let m = alloc.winner[k] - 1;
                self.c2_sum += cfg.priority[m] * su_rate(truth.su_gain[l], p);
                self.p2_sum[m] += p;
            }
            if truth.active[k] {
                let x = link.map_or(0.0, |l| truth.sp_gain[l] * p);
                self.p1_sum[k] += x;
                self.r1_sum[k] += pu_rate(cfg.pu_snr[k], x);
                self.active_slots[k] += 1;
            }
        }
    }

    pub fn num_channels(&self) -> usize {
        self.p1_sum.len()
    }

    pub fn num_sus(&self) -> usize {
        self.p2_sum.len()
    }

    /// c̄_2: weighted sum-rate per slot.
    pub fn c2_avg(&self) -> Option<f64> {
        (self.slots > 0).then(|| self.c2_sum / self.slots as f64)
    }

    /// p̄_2^m.
    pub fn p2_avg(&self, m: usize) -> Option<f64> {
        (self.slots > 0).then(|| self.p2_sum[m] / self.slots as f64)
    }

    /// p̄_{k,1}: interference per active slot.
    pub fn p1_avg(&self, k: usize) -> Option<f64> {
        let n = self.active_slots[k];
        (n > 0).then(|| self.p1_sum[k] / n as f64)
    }

    /// r̄_{k,1}: PU rate per active slot.
    pub fn r1_avg(&self, k: usize) -> Option<f64> {
        let n = self.active_slots[k];
        (n > 0).then(|| self.r1_sum[k] / n as f64)
    }

    /// Capacity-loss fraction of channel k.
    pub fn eps1(&self, k: usize) -> Option<f64> {
        self.r1_avg(k).map(|r| 1.0 - r / self.full_rate[k])
    }

    /// ε̄_1: mean capacity loss over channels with at least one active slot.
    pub fn eps1_avg(&self) -> Option<f64> {
        mean((0..self.num_channels()).filter_map(|k| self.eps1(k)))
    }

    /// p̄_1: mean interference over channels with at least one active slot.
    pub fn p1_mean(&self) -> Option<f64> {
        mean((0..self.num_channels()).filter_map(|k| self.p1_avg(k)))
    }

    /// Fraction of slots in which channel k was active.
    pub fn activity_fraction(&self, k: usize) -> Option<f64> {
        (self.slots > 0).then(|| self.active_slots[k] as f64 / self.slots as f64)
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Free-function form of [`Metrics::record`].
pub fn update_metrics(metrics: &mut Metrics, truth: &CsiTrue, alloc: &Allocation, cfg: &ScenarioConfig) {
    metrics.record(truth, alloc, cfg);
}
