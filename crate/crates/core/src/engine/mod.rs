//! Slot loop: channel → sensing → beliefs → allocation → dual update →
//! metrics.

mod metrics;
mod report;
mod trace;

use rand::SeedableRng;
use serde::Serialize;

pub use metrics::{update_metrics, Metrics};
pub use report::{feasibility_report, ConstraintCheck, FeasibilityReport, Tolerances};
pub use trace::{trace_header, TraceRow, TraceWriter};

use crate::allocator::{allocate_slot, Allocation, Multipliers};
use crate::beliefs::{BeliefState, BeliefTracker};
use crate::config::ScenarioConfig;
use crate::duals::{update_all_with_belief, DualState};
use crate::error::Result;
use crate::model::{step_channel, CsiTrue, ModelState, Sensor, SimRng};

const CHANNEL_STREAM: u64 = 0;
const SENSING_STREAM: u64 = 1;

/// Everything produced in one slot.
#[derive(Debug, Clone)]
pub struct SlotOutcome {
    pub truth: CsiTrue,
    pub beliefs: BeliefState,
    pub allocation: Allocation,
}

/// One simulated sequence. Channel and sensing randomness use separate
/// streams of the seed, so runs that differ only in scheme or CSI variant
/// see the same channel realizations.
pub struct Engine {
    cfg: ScenarioConfig,
    channel_rng: SimRng,
    sensing_rng: SimRng,
    model: ModelState,
    sensor: Sensor,
    tracker: BeliefTracker,
    duals: DualState,
    running: Metrics,
    reported: Metrics,
    rate_infeasible_slots: usize,
}

impl Engine {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        Self::with_multipliers(cfg, Multipliers::for_config(cfg))
    }

    /// Starts from the given multipliers instead of zero.
    pub fn with_multipliers(cfg: &ScenarioConfig, lambda: Multipliers) -> Result<Self> {
        cfg.validate()?;
        let mut channel_rng = SimRng::seed_from_u64(cfg.seed);
        channel_rng.set_stream(CHANNEL_STREAM);
        let mut sensing_rng = SimRng::seed_from_u64(cfg.seed);
        sensing_rng.set_stream(SENSING_STREAM);
        let model = ModelState::stationary(cfg, &mut channel_rng);
        Ok(Engine {
            cfg: cfg.clone(),
            channel_rng,
            sensing_rng,
            model,
            sensor: Sensor::new(cfg),
            tracker: BeliefTracker::new(cfg),
            duals: DualState::with_multipliers(cfg, lambda),
            running: Metrics::new(cfg),
            reported: Metrics::new(cfg),
            rate_infeasible_slots: 0,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// Index of the next slot.
    pub fn slot(&self) -> usize {
        self.model.next_slot()
    }

    pub fn finished(&self) -> bool {
        self.slot() >= self.cfg.horizon
    }

    /// Averages over every slot so far.
    pub fn running(&self) -> &Metrics {
        &self.running
    }

    /// Averages over the slots after the burn-in.
    pub fn reported(&self) -> &Metrics {
        &self.reported
    }

    pub fn duals(&self) -> &DualState {
        &self.duals
    }

    pub fn step(&mut self) -> Result<SlotOutcome> {
        let cfg = &self.cfg;
        let truth = step_channel(&mut self.model, cfg, &mut self.channel_rng);
        let obs = self.sensor.sense(&truth, cfg, &mut self.sensing_rng);
        let beliefs = self.tracker.update(&obs, &truth, cfg)?;
        let allocation = allocate_slot(&beliefs, &self.duals.lambda, cfg)?;
        update_all_with_belief(&mut self.duals, &beliefs, &allocation, cfg);
        self.running.record(&truth, &allocation, cfg);
        if truth.slot >= cfg.burn_in_slots() {
            self.reported.record(&truth, &allocation, cfg);
        }
        if allocation.rate_infeasible.iter().any(|&x| x) {
            self.rate_infeasible_slots += 1;
        }
        Ok(SlotOutcome {
            truth,
            beliefs,
            allocation,
        })
    }

    /// Runs to the horizon, calling `hook` after every slot.
    pub fn run_with(&mut self, mut hook: impl FnMut(&Engine, &SlotOutcome) -> Result<()>) -> Result<()> {
        while !self.finished() {
            let out = self.step()?;
            hook(self, &out)?;
        }
        Ok(())
    }

    pub fn trace_row(&self) -> TraceRow {
        TraceRow::new(self.slot().saturating_sub(1), &self.running, &self.duals.lambda)
    }

    pub fn into_output(self) -> RunOutput {
        RunOutput {
            config: self.cfg,
            reported: self.reported,
            running: self.running,
            duals: self.duals,
            rate_infeasible_slots: self.rate_infeasible_slots,
        }
    }
}

/// Final state of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    /// Post-burn-in averages.
    pub reported: Metrics,
    /// Averages from slot 0.
    pub running: Metrics,
    pub duals: DualState,
    pub rate_infeasible_slots: usize,
}

impl RunOutput {
    pub fn report(&self, tol: &Tolerances) -> FeasibilityReport {
        feasibility_report(&self.reported, &self.config, tol)
    }

    pub fn summary(&self, tol: &Tolerances) -> Summary {
        let m = &self.reported;
        let cfg = &self.config;
        Summary {
            scheme: cfg.scheme.name().into(),
            csi_variant: cfg.csi_variant.name().into(),
            seed: cfg.seed,
            horizon: cfg.horizon,
            burn_in: cfg.burn_in_slots(),
            c2_avg: m.c2_avg(),
            p2_avg: (0..cfg.num_sus).map(|i| m.p2_avg(i)).collect(),
            p1_avg: (0..cfg.num_channels).map(|k| m.p1_avg(k)).collect(),
            r1_avg: (0..cfg.num_channels).map(|k| m.r1_avg(k)).collect(),
            p1_mean: m.p1_mean(),
            eps1_avg: m.eps1_avg(),
            multipliers: self.duals.lambda.clone(),
            clamp_hits: self.duals.clamp_hits,
            rate_infeasible_slots: self.rate_infeasible_slots,
            tolerances: *tol,
            feasibility: self.report(tol),
        }
    }
}

/// Machine-readable digest of a run.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub scheme: String,
    pub csi_variant: String,
    pub seed: u64,
    pub horizon: usize,
    pub burn_in: usize,
    pub c2_avg: Option<f64>,
    pub p2_avg: Vec<Option<f64>>,
    pub p1_avg: Vec<Option<f64>>,
    pub r1_avg: Vec<Option<f64>>,
    pub p1_mean: Option<f64>,
    pub eps1_avg: Option<f64>,
    pub multipliers: Multipliers,
    pub clamp_hits: usize,
    pub rate_infeasible_slots: usize,
    pub tolerances: Tolerances,
    pub feasibility: FeasibilityReport,
}

/// Runs `cfg` from zero multipliers to its horizon.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let mut engine = Engine::new(cfg)?;
    engine.run_with(|_, _| Ok(()))?;
    Ok(engine.into_output())
}

/// As [`run`], writing a trace row every `every` slots (and after the last).
pub fn run_with_trace<W: std::io::Write>(
    cfg: &ScenarioConfig,
    trace: &mut TraceWriter<W>,
    every: usize,
) -> Result<RunOutput> {
    let mut engine = Engine::new(cfg)?;
    let every = every.max(1);
    engine.run_with(|e, out| {
        if out.truth.slot % every == 0 || e.finished() {
            trace.write(&e.trace_row())?;
        }
        Ok(())
    })?;
    Ok(engine.into_output())
}
