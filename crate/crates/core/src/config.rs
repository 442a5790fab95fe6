//! Scenario description and its text-file format.
//!
//! Files are TOML. Every scalar quantity may be given in linear units under
//! its plain key or in decibels under the same key with a `_db` suffix; the
//! conversion to linear happens here and nowhere else. Per-entity quantities
//! accept either one scalar (broadcast) or a full list:
//!
//! * per SU (`priority`, `avg_power_budget`): length `num_sus`;
//! * per channel (`max_interference`, `max_capacity_loss`, `pu_snr`): length `num_channels`;
//! * per link (`amplifier_cap`, `avg_gain_su`, `avg_gain_sp`, `sp_correlation`):
//!   length `num_channels * num_sus`, channel-major.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::rates::pu_rate;

/// Resource-allocation scheme: which DSA constraints are active and whether
/// each is enforced on average (dualized) or per slot (peak cap).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    None,
    AP,
    AC,
    APC,
    IP,
    IC,
    IPC,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::None,
        Scheme::AP,
        Scheme::AC,
        Scheme::APC,
        Scheme::IP,
        Scheme::IC,
        Scheme::IPC,
    ];

    /// Interference power limited on average (multiplier θ is tracked).
    pub fn long_term_interference(self) -> bool {
        matches!(self, Scheme::AP | Scheme::APC)
    }

    /// PU capacity loss limited on average (multiplier ρ is tracked).
    pub fn long_term_capacity(self) -> bool {
        matches!(self, Scheme::AC | Scheme::APC)
    }

    /// Interference power limited per slot through the peak cap.
    pub fn short_term_interference(self) -> bool {
        matches!(self, Scheme::IP | Scheme::IPC)
    }

    /// PU rate guaranteed per slot through the peak cap.
    pub fn short_term_capacity(self) -> bool {
        matches!(self, Scheme::IC | Scheme::IPC)
    }

    pub fn limits_interference(self) -> bool {
        self.long_term_interference() || self.short_term_interference()
    }

    pub fn limits_capacity(self) -> bool {
        self.long_term_capacity() || self.short_term_capacity()
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::None => "None",
            Scheme::AP => "AP",
            Scheme::AC => "AC",
            Scheme::APC => "APC",
            Scheme::IP => "IP",
            Scheme::IC => "IC",
            Scheme::IPC => "IPC",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

/// How the scheduler treats imperfectly sensed CSI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsiVariant {
    /// Belief-aware allocation (the proposed scheme).
    Optimal,
    /// Genie: decisions use the true CSI.
    #[serde(rename = "i")]
    TrueCsi,
    /// Observations are taken at face value, imperfections ignored.
    #[serde(rename = "ii")]
    Naive,
    /// Only stationary statistics are used for imperfectly sensed entities.
    #[serde(rename = "iii")]
    Statistical,
}

impl CsiVariant {
    pub const ALL: [CsiVariant; 4] = [
        CsiVariant::Optimal,
        CsiVariant::TrueCsi,
        CsiVariant::Naive,
        CsiVariant::Statistical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CsiVariant::Optimal => "optimal",
            CsiVariant::TrueCsi => "i",
            CsiVariant::Naive => "ii",
            CsiVariant::Statistical => "iii",
        }
    }
}

impl fmt::Display for CsiVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CsiVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CsiVariant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown CSI variant `{s}`")))
    }
}

/// PU activity process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ActivityModel {
    /// Two-state Markov chain; `p11 = Pr{active -> active}`, `p01 = Pr{idle -> active}`.
    GilbertElliott { p11: f64, p10: f64, p00: f64, p01: f64 },
    /// Independent across slots.
    Bernoulli { p_active: f64 },
}

impl ActivityModel {
    /// Stationary probability that the PU is active.
    pub fn stationary_active(&self) -> f64 {
        match *self {
            ActivityModel::GilbertElliott { p10, p01, .. } => {
                if p01 + p10 == 0.0 {
                    // Frozen chain: no unique stationary law, keep the prior at 1/2.
                    0.5
                } else {
                    p01 / (p01 + p10)
                }
            }
            ActivityModel::Bernoulli { p_active } => p_active,
        }
    }

    /// `(Pr{a'=1 | a=1}, Pr{a'=1 | a=0})`.
    pub fn transition_to_active(&self) -> (f64, f64) {
        match *self {
            ActivityModel::GilbertElliott { p11, p01, .. } => (p11, p01),
            ActivityModel::Bernoulli { p_active } => (p_active, p_active),
        }
    }

    fn validate(&self) -> Result<()> {
        let probs: Vec<f64> = match *self {
            ActivityModel::GilbertElliott { p11, p10, p00, p01 } => {
                for (a, b, name) in [(p11, p10, "p11 + p10"), (p00, p01, "p00 + p01")] {
                    if ((a + b) - 1.0).abs() > 1e-9 {
                        return Err(Error::Config(format!("activity {name} must equal 1")));
                    }
                }
                vec![p11, p10, p00, p01]
            }
            ActivityModel::Bernoulli { p_active } => vec![p_active],
        };
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("activity probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

impl Default for ActivityModel {
    fn default() -> Self {
        ActivityModel::GilbertElliott {
            p11: 0.975,
            p10: 0.025,
            p00: 0.9,
            p01: 0.1,
        }
    }
}

/// Sensing of the SU-to-AP gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SuGainSensing {
    #[default]
    Perfect,
    /// Scalar quantizer; thresholds are relative to the link's average gain
    /// (`L - 1` increasing values). Defaults to equi-probable regions.
    Quantized {
        levels: usize,
        thresholds: Option<Vec<f64>>,
    },
}

/// Sensing of PU activity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ActivitySensing {
    #[default]
    Perfect,
    /// Binary detector fired every `period` slots.
    Detector { p_fa: f64, p_md: f64, period: usize },
}

/// Sensing of the SU-to-PU low-pass channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SpChannelSensing {
    #[default]
    Perfect,
    /// Additive complex Gaussian noise with per-component variance `noise_var`
    /// (one per link), measured every `period` slots.
    Noisy { noise_var: Vec<f64>, period: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Sensing {
    pub su_gain: SuGainSensing,
    pub activity: ActivitySensing,
    pub sp_channel: SpChannelSensing,
}

impl Sensing {
    pub fn is_perfect(&self) -> bool {
        matches!(self.su_gain, SuGainSensing::Perfect)
            && matches!(self.activity, ActivitySensing::Perfect)
            && matches!(self.sp_channel, SpChannelSensing::Perfect)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    Constant,
    /// `eta[n] = eta * sqrt(decay_slots / (decay_slots + n))`.
    Diminishing {
        decay_slots: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stepsizes {
    pub pi: f64,
    pub theta: f64,
    pub rho: f64,
    pub schedule: StepSchedule,
}

impl Default for Stepsizes {
    fn default() -> Self {
        Stepsizes {
            pi: 0.01,
            theta: 0.01,
            rho: 0.01,
            schedule: StepSchedule::Constant,
        }
    }
}

impl Stepsizes {
    /// Scale factor applied to every stepsize at slot `n`.
    pub fn factor(&self, n: usize) -> f64 {
        match self.schedule {
            StepSchedule::Constant => 1.0,
            StepSchedule::Diminishing { decay_slots } => (decay_slots / (decay_slots + n as f64)).sqrt(),
        }
    }
}

/// Reading of the minimum long-term PU rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RateTarget {
    /// `(1 - eps) * r1(gamma, 0)`: the rate the PU gets while active.
    #[default]
    Conditional,
    /// `(1 - eps) * E[a] * r1(gamma, 0)`.
    Unconditional,
}

/// Full experiment description. All quantities are linear.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub num_sus: usize,
    pub num_channels: usize,
    /// β^m, per SU.
    pub priority: Vec<f64>,
    /// Long-term SU transmit power budget, per SU (W).
    pub avg_power_budget: Vec<f64>,
    /// Long-term interference limit at each PU while active (W); may be infinite.
    pub max_interference: Vec<f64>,
    /// Maximum relative PU capacity loss, per channel, in (0, 1].
    pub max_capacity_loss: Vec<f64>,
    /// PU link SNR γ_k (linear).
    pub pu_snr: Vec<f64>,
    /// Amplifier limit per link (W).
    pub amplifier_cap: Vec<f64>,
    /// Average SU-to-AP gain per link.
    pub avg_gain_su: Vec<f64>,
    /// Average SU-to-PU gain per link.
    pub avg_gain_sp: Vec<f64>,
    /// Gauss–Markov correlation of the SU-to-PU low-pass channel per link.
    pub sp_correlation: Vec<f64>,
    pub activity: ActivityModel,
    pub sensing: Sensing,
    pub stepsizes: Stepsizes,
    pub horizon: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub csi_variant: CsiVariant,
    pub rate_target: RateTarget,
    pub quadrature_order: usize,
    /// Slots discarded before the reported averages; defaults to half the horizon.
    pub burn_in: Option<usize>,
}

impl ScenarioConfig {
    /// Reference scenario: 5 SUs, 10 channels, 3 dB SU links, 0 dB SU-to-PU
    /// links, 10 dB PU links, PUs active 80% of the time.
    pub fn reference() -> Self {
        Self::uniform(5, 10)
    }

    /// Reference values for every link, with `m` SUs and `k` channels.
    pub fn uniform(m: usize, k: usize) -> Self {
        ScenarioConfig {
            num_sus: m,
            num_channels: k,
            priority: vec![1.0; m],
            avg_power_budget: vec![1.0; m],
            max_interference: vec![0.15; k],
            max_capacity_loss: vec![0.05; k],
            pu_snr: vec![db_to_linear(10.0); k],
            amplifier_cap: vec![DEFAULT_AMPLIFIER_CAP; k * m],
            avg_gain_su: vec![db_to_linear(3.0); k * m],
            avg_gain_sp: vec![1.0; k * m],
            sp_correlation: vec![0.0; k * m],
            activity: ActivityModel::default(),
            sensing: Sensing::default(),
            stepsizes: Stepsizes::default(),
            horizon: 20_000,
            seed: 1,
            scheme: Scheme::APC,
            csi_variant: CsiVariant::Optimal,
            rate_target: RateTarget::Conditional,
            quadrature_order: 64,
            burn_in: None,
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.resolve()
    }

    /// Link index of `(channel k, SU m)`.
    #[inline]
    pub fn idx(&self, k: usize, m: usize) -> usize {
        k * self.num_sus + m
    }

    pub fn num_links(&self) -> usize {
        self.num_channels * self.num_sus
    }

    pub fn burn_in_slots(&self) -> usize {
        self.burn_in.unwrap_or(self.horizon / 2)
    }

    /// PU rate without SU interference, r1(γ_k, 0).
    pub fn pu_full_rate(&self, k: usize) -> f64 {
        pu_rate(self.pu_snr[k], 0.0)
    }

    /// Per-slot rate demand `(1 - ε̌_k)·r1(γ_k, 0)` of the short-term constraint.
    pub fn short_term_rate_target(&self, k: usize) -> f64 {
        (1.0 - self.max_capacity_loss[k]) * self.pu_full_rate(k)
    }

    /// Minimum long-term PU rate ř_k for the configured capacity-loss limit.
    pub fn rate_target(&self, k: usize) -> f64 {
        let base = (1.0 - self.max_capacity_loss[k]) * self.pu_full_rate(k);
        match self.rate_target {
            RateTarget::Conditional => base,
            RateTarget::Unconditional => base * self.activity.stationary_active(),
        }
    }

    /// Interference limit used by the scheme (infinite when the scheme ignores it).
    pub fn scheme_interference_limit(&self, k: usize) -> f64 {
        if self.scheme.limits_interference() {
            self.max_interference[k]
        } else {
            f64::INFINITY
        }
    }

    /// Rate target used by the scheme (zero when the scheme ignores capacity loss).
    pub fn scheme_rate_target(&self, k: usize) -> f64 {
        if self.scheme.limits_capacity() {
            self.rate_target(k)
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (m, k) = (self.num_sus, self.num_channels);
        if k == 0 || self.horizon == 0 {
            return Err(Error::Config("num_channels and horizon must be at least 1".into()));
        }
        let check_len = |name: &str, v: &[f64], n: usize| -> Result<()> {
            if v.len() != n {
                return Err(Error::Config(format!("`{name}` has {} entries, expected {n}", v.len())));
            }
            Ok(())
        };
        check_len("priority", &self.priority, m)?;
        check_len("avg_power_budget", &self.avg_power_budget, m)?;
        check_len("max_interference", &self.max_interference, k)?;
        check_len("max_capacity_loss", &self.max_capacity_loss, k)?;
        check_len("pu_snr", &self.pu_snr, k)?;
        check_len("amplifier_cap", &self.amplifier_cap, k * m)?;
        check_len("avg_gain_su", &self.avg_gain_su, k * m)?;
        check_len("avg_gain_sp", &self.avg_gain_sp, k * m)?;
        check_len("sp_correlation", &self.sp_correlation, k * m)?;

        let positive = |name: &str, v: &[f64]| -> Result<()> {
            if v.iter().any(|x| x.is_nan() || *x <= 0.0) {
                return Err(Error::Config(format!("`{name}` must be positive")));
            }
            Ok(())
        };
        positive("priority", &self.priority)?;
        positive("avg_power_budget", &self.avg_power_budget)?;
        positive("max_interference", &self.max_interference)?;
        positive("pu_snr", &self.pu_snr)?;
        positive("avg_gain_su", &self.avg_gain_su)?;
        positive("avg_gain_sp", &self.avg_gain_sp)?;
        positive("amplifier_cap", &self.amplifier_cap)?;
        if self.amplifier_cap.iter().any(|c| c.is_infinite())
            || self
                .priority
                .iter()
                .chain(&self.avg_power_budget)
                .any(|x| x.is_infinite())
        {
            return Err(Error::Config(
                "amplifier caps, priorities and power budgets must be finite".into(),
            ));
        }
        if self.max_capacity_loss.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::Config("`max_capacity_loss` must lie in (0, 1]".into()));
        }
        if self.sp_correlation.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::Config("`sp_correlation` must lie in [0, 1]".into()));
        }
        self.activity.validate()?;

        match &self.sensing.su_gain {
            SuGainSensing::Perfect => {}
            SuGainSensing::Quantized { levels, thresholds } => {
                if *levels == 0 {
                    return Err(Error::Config("quantizer needs at least one level".into()));
                }
                if let Some(t) = thresholds {
                    if t.len() + 1 != *levels {
                        return Err(Error::Config(format!(
                            "quantizer with {levels} levels needs {} thresholds",
                            levels - 1
                        )));
                    }
                    if t.iter().any(|x| !(x.is_finite() && *x > 0.0)) || t.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::Config(
                            "quantizer thresholds must be positive and increasing".into(),
                        ));
                    }
                }
            }
        }
        if let ActivitySensing::Detector { p_fa, p_md, period } = self.sensing.activity {
            if !(0.0..=1.0).contains(&p_fa) || !(0.0..=1.0).contains(&p_md) {
                return Err(Error::Config("detector probabilities must lie in [0, 1]".into()));
            }
            if period == 0 {
                return Err(Error::Config("detector period must be at least 1".into()));
            }
        }
        if let SpChannelSensing::Noisy { noise_var, period } = &self.sensing.sp_channel {
            check_len("sp noise_var", noise_var, k * m)?;
            if noise_var.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Config(
                    "measurement noise variance must be finite and nonnegative".into(),
                ));
            }
            if *period == 0 {
                return Err(Error::Config("SP sensing period must be at least 1".into()));
            }
        }
        let s = &self.stepsizes;
        if [s.pi, s.theta, s.rho].iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Config("stepsizes must be finite and nonnegative".into()));
        }
        if let StepSchedule::Diminishing { decay_slots } = s.schedule {
            if !(decay_slots.is_finite() && decay_slots > 0.0) {
                return Err(Error::Config("decay_slots must be positive".into()));
            }
        }
        if self.quadrature_order < 2 {
            return Err(Error::Config("quadrature_order must be at least 2".into()));
        }
        if self.burn_in.is_some_and(|b| b >= self.horizon) {
            return Err(Error::Config("burn_in must be smaller than the horizon".into()));
        }
        Ok(())
    }
}

/// Default amplifier limit per link (W).
pub const DEFAULT_AMPLIFIER_CAP: f64 = 10.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

// ---------------------------------------------------------------------------
// Raw file format
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Values {
    One(f64),
    Many(Vec<f64>),
}

impl Values {
    fn map(self, f: impl Fn(f64) -> f64) -> Values {
        match self {
            Values::One(x) => Values::One(f(x)),
            Values::Many(v) => Values::Many(v.into_iter().map(f).collect()),
        }
    }

    fn expand(self, name: &str, n: usize) -> Result<Vec<f64>> {
        match self {
            Values::One(x) => Ok(vec![x; n]),
            Values::Many(v) if v.len() == n => Ok(v),
            Values::Many(v) => Err(Error::Config(format!(
                "`{name}` has {} entries, expected 1 or {n}",
                v.len()
            ))),
        }
    }
}

fn pick(name: &str, linear: Option<Values>, db: Option<Values>, default: Option<f64>) -> Result<Values> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(Error::Config(format!("both `{name}` and `{name}_db` given"))),
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v.map(db_to_linear)),
        (None, None) => default
            .map(Values::One)
            .ok_or_else(|| Error::Config(format!("missing `{name}` (or `{name}_db`)"))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    num_sus: usize,
    num_channels: usize,
    horizon: Option<usize>,
    seed: Option<u64>,
    scheme: Option<String>,
    csi_variant: Option<String>,
    rate_target: Option<RateTarget>,
    quadrature_order: Option<usize>,
    burn_in: Option<usize>,

    priority: Option<Values>,
    priority_db: Option<Values>,
    avg_power_budget: Option<Values>,
    avg_power_budget_db: Option<Values>,
    max_interference: Option<Values>,
    max_interference_db: Option<Values>,
    max_capacity_loss: Option<Values>,
    pu_snr: Option<Values>,
    pu_snr_db: Option<Values>,
    amplifier_cap: Option<Values>,
    amplifier_cap_db: Option<Values>,
    avg_gain_su: Option<Values>,
    avg_gain_su_db: Option<Values>,
    avg_gain_sp: Option<Values>,
    avg_gain_sp_db: Option<Values>,
    sp_correlation: Option<Values>,

    activity: Option<ActivityModel>,
    #[serde(default)]
    sensing: RawSensing,
    stepsizes: Option<RawStepsizes>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSensing {
    su_gain: Option<SuGainSensing>,
    activity: Option<ActivitySensing>,
    sp_channel: Option<RawSpSensing>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpSensing {
    mode: String,
    /// Per-component noise variance (linear).
    noise_var: Option<Values>,
    /// Ratio between average channel power and noise power, `avg_gain_sp / (2 noise_var)`.
    snr: Option<Values>,
    snr_db: Option<Values>,
    period: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStepsizes {
    pi: Option<f64>,
    theta: Option<f64>,
    rho: Option<f64>,
    schedule: Option<String>,
    decay_slots: Option<f64>,
}

impl RawConfig {
    fn resolve(self) -> Result<ScenarioConfig> {
        let (m, k) = (self.num_sus, self.num_channels);
        let links = k * m;
        let def = ScenarioConfig::reference();

        let priority = pick("priority", self.priority, self.priority_db, Some(1.0))?.expand("priority", m)?;
        let avg_power_budget = pick(
            "avg_power_budget",
            self.avg_power_budget,
            self.avg_power_budget_db,
            None,
        )?
        .expand("avg_power_budget", m)?;
        let max_interference = pick(
            "max_interference",
            self.max_interference,
            self.max_interference_db,
            None,
        )?
        .expand("max_interference", k)?;
        let max_capacity_loss =
            pick("max_capacity_loss", self.max_capacity_loss, None, None)?.expand("max_capacity_loss", k)?;
        let pu_snr = pick("pu_snr", self.pu_snr, self.pu_snr_db, None)?.expand("pu_snr", k)?;
        let amplifier_cap = pick(
            "amplifier_cap",
            self.amplifier_cap,
            self.amplifier_cap_db,
            Some(DEFAULT_AMPLIFIER_CAP),
        )?
        .expand("amplifier_cap", links)?;
        let avg_gain_su =
            pick("avg_gain_su", self.avg_gain_su, self.avg_gain_su_db, None)?.expand("avg_gain_su", links)?;
        let avg_gain_sp =
            pick("avg_gain_sp", self.avg_gain_sp, self.avg_gain_sp_db, None)?.expand("avg_gain_sp", links)?;
        let sp_correlation =
            pick("sp_correlation", self.sp_correlation, None, Some(0.0))?.expand("sp_correlation", links)?;

        let sp_channel = match self.sensing.sp_channel {
            None => SpChannelSensing::Perfect,
            Some(raw) => match raw.mode.as_str() {
                "perfect" => SpChannelSensing::Perfect,
                "noisy" => {
                    let noise_var = match (raw.noise_var, raw.snr, raw.snr_db) {
                        (Some(v), None, None) => v.expand("sp noise_var", links)?,
                        (None, snr, snr_db) if snr.is_some() || snr_db.is_some() => {
                            let snr = pick("snr", snr, snr_db, None)?.expand("sp snr", links)?;
                            avg_gain_sp.iter().zip(&snr).map(|(h, s)| h / (2.0 * s)).collect()
                        }
                        _ => {
                            return Err(Error::Config(
                                "noisy SP sensing needs exactly one of `noise_var`, `snr`, `snr_db`".into(),
                            ))
                        }
                    };
                    SpChannelSensing::Noisy {
                        noise_var,
                        period: raw.period.unwrap_or(1),
                    }
                }
                other => return Err(Error::Config(format!("unknown sp_channel sensing mode `{other}`"))),
            },
        };

        let stepsizes = match self.stepsizes {
            None => Stepsizes::default(),
            Some(raw) => {
                let d = Stepsizes::default();
                let schedule = match raw.schedule.as_deref() {
                    None | Some("constant") => StepSchedule::Constant,
                    Some("diminishing") => StepSchedule::Diminishing {
                        decay_slots: raw.decay_slots.unwrap_or(1000.0),
                    },
                    Some(other) => return Err(Error::Config(format!("unknown stepsize schedule `{other}`"))),
                };
                Stepsizes {
                    pi: raw.pi.unwrap_or(d.pi),
                    theta: raw.theta.unwrap_or(d.theta),
                    rho: raw.rho.unwrap_or(d.rho),
                    schedule,
                }
            }
        };

        let cfg = ScenarioConfig {
            num_sus: m,
            num_channels: k,
            priority,
            avg_power_budget,
            max_interference,
            max_capacity_loss,
            pu_snr,
            amplifier_cap,
            avg_gain_su,
            avg_gain_sp,
            sp_correlation,
            activity: self.activity.unwrap_or(def.activity),
            sensing: Sensing {
                su_gain: self.sensing.su_gain.unwrap_or_default(),
                activity: self.sensing.activity.unwrap_or_default(),
                sp_channel,
            },
            stepsizes,
            horizon: self.horizon.unwrap_or(def.horizon),
            seed: self.seed.unwrap_or(def.seed),
            scheme: self
                .scheme
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or(def.scheme),
            csi_variant: self
                .csi_variant
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or(def.csi_variant),
            rate_target: self.rate_target.unwrap_or_default(),
            quadrature_order: self.quadrature_order.unwrap_or(def.quadrature_order),
            burn_in: self.burn_in,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
