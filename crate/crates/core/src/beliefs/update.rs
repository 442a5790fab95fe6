use super::expect::{rice_law, truncated_exp_law, RegionLaws};
use super::{activity_posterior, gm_predict, kalman_correct, stale_activity_update};
use super::{BeliefState, DiscreteLaw, QuadratureSpec, SpBelief, SuBelief};
use crate::config::{ActivitySensing, CsiVariant, ScenarioConfig, SpChannelSensing, SuGainSensing};
use crate::error::Result;
use crate::model::{CsiObservation, CsiTrue, Quantizer, SuReport};

/// Carries the filter state needed to turn observations into beliefs, slot
/// after slot, for the configured CSI variant.
#[derive(Debug, Clone)]
pub struct BeliefTracker {
    variant: CsiVariant,
    spec: QuadratureSpec,
    quantizers: Option<Vec<Quantizer>>,
    region_laws: Vec<RegionLaws>,
    prior_su: Vec<DiscreteLaw>,
    prior_sp: Vec<DiscreteLaw>,
    activity: Vec<f64>,
    kalman: Vec<([f64; 2], f64)>,
    last_meas: Vec<[f64; 2]>,
}

impl BeliefTracker {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        let spec = QuadratureSpec::new(cfg.quadrature_order);
        let rules = spec.rules();
        let quantizers: Option<Vec<Quantizer>> = match &cfg.sensing.su_gain {
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
        let region_laws = quantizers
            .iter()
            .flatten()
            .map(|q| RegionLaws::new(q, &rules))
            .collect();
        let noisy_sp = matches!(cfg.sensing.sp_channel, SpChannelSensing::Noisy { .. });
        let prior_su = if quantizers.is_some() {
            cfg.avg_gain_su
                .iter()
                .map(|&h| truncated_exp_law(0.0, f64::INFINITY, h, &rules))
                .collect()
        } else {
            Vec::new()
        };
        let prior_sp = if noisy_sp {
            cfg.avg_gain_sp
                .iter()
                .map(|&h| rice_law([0.0, 0.0], h / 2.0, &rules))
                .collect()
        } else {
            Vec::new()
        };
        BeliefTracker {
            variant: cfg.csi_variant,
            spec,
            quantizers,
            region_laws,
            prior_su,
            prior_sp,
            activity: vec![cfg.activity.stationary_active(); cfg.num_channels],
            kalman: cfg.avg_gain_sp.iter().map(|&h| ([0.0, 0.0], h / 2.0)).collect(),
            last_meas: vec![[0.0, 0.0]; cfg.num_links()],
        }
    }

    pub fn spec(&self) -> QuadratureSpec {
        self.spec
    }

    /// Beliefs for the slot of `obs`. `truth` is consulted only by the
    /// genie variant.
    pub fn update(&mut self, obs: &CsiObservation, truth: &CsiTrue, cfg: &ScenarioConfig) -> Result<BeliefState> {
        if self.variant == CsiVariant::TrueCsi {
            return Ok(BeliefState::point_masses(truth));
        }
        self.update_activity(obs, cfg)?;
        let (su, su_laws) = self.su_beliefs(obs);
        let (sp, sp_laws) = self.sp_beliefs(obs, cfg)?;
        Ok(BeliefState::with_laws(self.activity.clone(), su, sp, su_laws, sp_laws))
    }

    fn update_activity(&mut self, obs: &CsiObservation, cfg: &ScenarioConfig) -> Result<()> {
        let flag = |k: usize| if obs.activity_flag[k] { 1.0 } else { 0.0 };
        match cfg.sensing.activity {
            ActivitySensing::Perfect => {
                for (k, q) in self.activity.iter_mut().enumerate() {
                    *q = flag(k);
                }
            }
            ActivitySensing::Detector { p_fa, p_md, .. } => {
                let p1 = cfg.activity.stationary_active();
                let (p11, p01) = cfg.activity.transition_to_active();
                for k in 0..cfg.num_channels {
                    self.activity[k] = match self.variant {
                        CsiVariant::Naive => flag(k),
                        CsiVariant::Statistical => p1,
                        _ if obs.activity_fresh[k] => {
                            activity_posterior(obs.activity_flag[k], p_fa, p_md, 1.0 - p1, p1)?
                        }
                        _ => stale_activity_update(self.activity[k], p11, p01),
                    };
                }
            }
        }
        Ok(())
    }

    fn su_beliefs(&self, obs: &CsiObservation) -> (Vec<SuBelief>, Vec<DiscreteLaw>) {
        obs.su
            .iter()
            .enumerate()
            .map(|(l, report)| match *report {
                SuReport::Exact(gain) => (SuBelief::PointMass { gain }, DiscreteLaw::point(gain)),
                SuReport::Region(r) => {
                    let q = &self.quantizers.as_ref().expect("region report without quantizer")[l];
                    match self.variant {
                        CsiVariant::Naive => {
                            let gain = q.region_mean(r);
                            (SuBelief::PointMass { gain }, DiscreteLaw::point(gain))
                        }
                        CsiVariant::Statistical => (
                            SuBelief::TruncatedExp {
                                lower: 0.0,
                                upper: f64::INFINITY,
                                mean: q.mean(),
                            },
                            self.prior_su[l].clone(),
                        ),
                        _ => {
                            let (lower, upper) = q.bounds(r);
                            (
                                SuBelief::TruncatedExp {
                                    lower,
                                    upper,
                                    mean: q.mean(),
                                },
                                self.region_laws[l].get(r).clone(),
                            )
                        }
                    }
                }
            })
            .unzip()
    }

    fn sp_beliefs(&mut self, obs: &CsiObservation, cfg: &ScenarioConfig) -> Result<(Vec<SpBelief>, Vec<DiscreteLaw>)> {
        let noise_var = match &cfg.sensing.sp_channel {
            SpChannelSensing::Perfect => {
                return Ok(obs
                    .sp_measurement
                    .iter()
                    .map(|m| {
                        let g = m.expect("perfect sensing always measures");
                        let gain = g[0] * g[0] + g[1] * g[1];
                        (SpBelief::PointMass { gain }, DiscreteLaw::point(gain))
                    })
                    .unzip());
            }
            SpChannelSensing::Noisy { noise_var, .. } => noise_var,
        };
        let rules = self.spec.rules();
        let mut beliefs = Vec::with_capacity(obs.sp_measurement.len());
        let mut laws = Vec::with_capacity(obs.sp_measurement.len());
        for (l, meas) in obs.sp_measurement.iter().enumerate() {
            if let Some(g) = meas {
                self.last_meas[l] = *g;
            }
            match self.variant {
                CsiVariant::Naive => {
                    let g = self.last_meas[l];
                    let gain = g[0] * g[0] + g[1] * g[1];
                    beliefs.push(SpBelief::PointMass { gain });
                    laws.push(DiscreteLaw::point(gain));
                }
                CsiVariant::Statistical => {
                    beliefs.push(SpBelief::Gaussian {
                        mean: [0.0, 0.0],
                        var: cfg.avg_gain_sp[l] / 2.0,
                    });
                    laws.push(self.prior_sp[l].clone());
                }
                _ => {
                    let (mean, var) = self.kalman[l];
                    let (mut mean, mut var) = gm_predict(mean, var, cfg.sp_correlation[l], cfg.avg_gain_sp[l] / 2.0);
                    if let Some(g) = meas {
                        (mean, var) = kalman_correct(mean, var, *g, noise_var[l])?;
                    }
                    self.kalman[l] = (mean, var);
                    beliefs.push(SpBelief::Gaussian { mean, var });
                    laws.push(rice_law(mean, var, &rules));
                }
            }
        }
        Ok((beliefs, laws))
    }
}

/// Free-function form of [`BeliefTracker::update`].
pub fn update_beliefs(
    tracker: &mut BeliefTracker,
    obs: &CsiObservation,
    truth: &CsiTrue,
    cfg: &ScenarioConfig,
) -> Result<BeliefState> {
    tracker.update(obs, truth, cfg)
}
