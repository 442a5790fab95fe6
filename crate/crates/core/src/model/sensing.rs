//! Observations delivered to the scheduler.

use rand::Rng;
use rand_distr::StandardNormal;

use super::channel::CsiTrue;
use super::quantizer::Quantizer;
use crate::config::{ActivitySensing, ScenarioConfig, SpChannelSensing, SuGainSensing};

/// What the scheduler learns about one SU-to-AP gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuReport {
    Exact(f64),
    /// Quantizer region, in `0..levels`.
    Region(usize),
}

/// Sensed CSI of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiObservation {
    pub slot: usize,
    /// Detector output ã_{k,1} (stale between sensing instants).
    pub activity_flag: Vec<bool>,
    /// Whether the detector fired this slot.
    pub activity_fresh: Vec<bool>,
    pub su: Vec<SuReport>,
    /// g̃_{k,1}^m, present iff the link was sensed this slot (s_k^m = 1).
    pub sp_measurement: Vec<Option<[f64; 2]>>,
}

/// Sensing front end. Holds the quantizers and the last detector outputs.
#[derive(Debug, Clone)]
pub struct Sensor {
    quantizers: Option<Vec<Quantizer>>,
    last_flag: Vec<bool>,
}

impl Sensor {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        let quantizers = match &cfg.sensing.su_gain {
            SuGainSensing::Perfect => None,
            SuGainSensing::Quantized { levels, thresholds } => Some(
                cfg.avg_gain_su
                    .iter()
                    .map(|&mean| match thresholds {
                        Some(rel) => Quantizer::from_relative(rel, mean),
                        None => Quantizer::equiprobable(*levels, mean),
                    })
                    .collect(),
            ),
        };
        Sensor {
            quantizers,
            last_flag: vec![false; cfg.num_channels],
        }
    }

    /// Quantizer of each link, when SU gains are quantized.
    pub fn quantizers(&self) -> Option<&[Quantizer]> {
        self.quantizers.as_deref()
    }

    pub fn sense<R: Rng + ?Sized>(&mut self, truth: &CsiTrue, cfg: &ScenarioConfig, rng: &mut R) -> CsiObservation {
        let n = truth.slot;
        let k_count = cfg.num_channels;

        let mut activity_fresh = vec![true; k_count];
        match cfg.sensing.activity {
            ActivitySensing::Perfect => self.last_flag.clone_from(&truth.active),
            ActivitySensing::Detector { p_fa, p_md, period } => {
                let fires = n.is_multiple_of(period);
                for (k, fresh) in activity_fresh.iter_mut().enumerate() {
                    *fresh = fires;
                    if fires {
                        let u: f64 = rng.random();
                        self.last_flag[k] = if truth.active[k] { u >= p_md } else { u < p_fa };
                    }
                }
            }
        }

        let su = match &self.quantizers {
            None => truth.su_gain.iter().map(|&h| SuReport::Exact(h)).collect(),
            Some(qs) => truth
                .su_gain
                .iter()
                .zip(qs)
                .map(|(&h, q)| SuReport::Region(q.region(h)))
                .collect(),
        };

        let sp_measurement = match &cfg.sensing.sp_channel {
            SpChannelSensing::Perfect => truth.sp_lowpass.iter().map(|g| Some(*g)).collect(),
            SpChannelSensing::Noisy { noise_var, period } => {
                let sensed = n.is_multiple_of(*period);
                truth
                    .sp_lowpass
                    .iter()
                    .zip(noise_var)
                    .map(|(g, &nu)| {
                        sensed.then(|| {
                            let sd = nu.sqrt();
                            [
                                g[0] + sd * rng.sample::<f64, _>(StandardNormal),
                                g[1] + sd * rng.sample::<f64, _>(StandardNormal),
                            ]
                        })
                    })
                    .collect()
            }
        };

        CsiObservation {
            slot: n,
            activity_flag: self.last_flag.clone(),
            activity_fresh,
            su,
            sp_measurement,
        }
    }
}

/// Free-function form of [`Sensor::sense`].
pub fn sense<R: Rng + ?Sized>(
    sensor: &mut Sensor,
    truth: &CsiTrue,
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> CsiObservation {
    sensor.sense(truth, cfg, rng)
}
