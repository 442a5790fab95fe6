use std::sync::Arc;

use super::{DiscreteLaw, Node, SpBelief, SuBelief};
use crate::error::{Error, Result};
use crate::quadrature::{bessel_i0e, rules, Rules};

/// Half-width, in standard deviations, of the radial integration window for
/// Gaussian low-pass beliefs.
const RICE_HALF_WIDTH: f64 = 12.0;

/// Order of the quadrature rules used to discretize beliefs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { order: 64 }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize) -> Self {
        QuadratureSpec { order }
    }

    pub(crate) fn rules(self) -> Rules {
        rules(self.order)
    }
}

/// A belief over a scalar gain that can be turned into quadrature nodes.
pub trait GainBelief {
    fn discretize(&self, spec: QuadratureSpec) -> DiscreteLaw;
}

impl GainBelief for SuBelief {
    fn discretize(&self, spec: QuadratureSpec) -> DiscreteLaw {
        match *self {
            SuBelief::PointMass { gain } => DiscreteLaw::point(gain),
            SuBelief::TruncatedExp { lower, upper, mean } => truncated_exp_law(lower, upper, mean, &spec.rules()),
        }
    }
}

impl GainBelief for SpBelief {
    fn discretize(&self, spec: QuadratureSpec) -> DiscreteLaw {
        match *self {
            SpBelief::PointMass { gain } => DiscreteLaw::point(gain),
            SpBelief::Gaussian { mean, var } => rice_law(mean, var, &spec.rules()),
        }
    }
}

/// Nodes of an exponential law (mean `mean`) restricted to `[lower, upper)`.
pub(crate) fn truncated_exp_law(lower: f64, upper: f64, mean: f64, rules: &Rules) -> DiscreteLaw {
    if upper.is_infinite() {
        let r = &rules.laguerre;
        let nodes = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(&t, &w)| Node {
                value: lower + mean * t,
                weight: w,
            })
            .collect();
        return DiscreteLaw::from_nodes(nodes);
    }
    let mass = -(-(upper - lower) / mean).exp_m1();
    if mass <= 0.0 {
        return DiscreteLaw::point(0.5 * (lower + upper));
    }
    let nodes = rules
        .legendre
        .mapped(lower, upper)
        .map(|(h, w)| Node {
            value: h,
            weight: w * (-(h - lower) / mean).exp() / (mean * mass),
        })
        .collect();
    DiscreteLaw::from_nodes(nodes)
}

/// Nodes of `h = ‖g‖²` with `g ~ N(mean, var·I₂)`. The radius `u = ‖g‖/√var`
/// is Rice distributed with noncentrality `‖mean‖/√var`.
pub(crate) fn rice_law(mean: [f64; 2], var: f64, rules: &Rules) -> DiscreteLaw {
    let m2 = mean[0] * mean[0] + mean[1] * mean[1];
    if var <= 0.0 {
        return DiscreteLaw::point(m2);
    }
    let nc = (m2 / var).sqrt();
    let lo = (nc - RICE_HALF_WIDTH).max(0.0);
    let hi = nc + RICE_HALF_WIDTH;
    let nodes = rules
        .legendre
        .mapped(lo, hi)
        .map(|(u, w)| {
            let d = u - nc;
            Node {
                value: var * u * u,
                weight: w * u * (-0.5 * d * d).exp() * bessel_i0e(u * nc),
            }
        })
        .collect();
    DiscreteLaw::from_nodes(nodes)
}

/// `E_b[f(h)]` for a gain belief, by quadrature of order `spec.order`.
pub fn expect_over_belief<B: GainBelief>(f: impl Fn(f64) -> f64, belief: &B, spec: QuadratureSpec) -> Result<f64> {
    let law = belief.discretize(spec);
    let mut acc = 0.0;
    for n in law.nodes() {
        let v = f(n.value);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand {
                gain: n.value,
                value: v,
            });
        }
        acc += n.weight * v;
    }
    Ok(acc)
}

/// `E[h_{k,1}^m]` in closed form.
pub fn expected_sp_gain(belief: &SpBelief) -> f64 {
    match *belief {
        SpBelief::PointMass { gain } => gain,
        SpBelief::Gaussian { mean, var } => mean[0] * mean[0] + mean[1] * mean[1] + 2.0 * var,
    }
}

/// Per-region node sets of one quantizer, built once.
#[derive(Debug, Clone)]
pub(crate) struct RegionLaws {
    laws: Arc<[DiscreteLaw]>,
}

impl RegionLaws {
    pub(crate) fn new(q: &crate::model::Quantizer, rules: &Rules) -> Self {
        let laws = (0..q.levels())
            .map(|l| {
                let (lo, hi) = q.bounds(l);
                truncated_exp_law(lo, hi, q.mean(), rules)
            })
            .collect::<Vec<_>>();
        RegionLaws { laws: laws.into() }
    }

    pub(crate) fn get(&self, region: usize) -> &DiscreteLaw {
        &self.laws[region]
    }
}
