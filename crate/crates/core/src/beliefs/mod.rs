//! Instantaneous beliefs about the CSI and expectations over them.
//!
//! Every gain belief has a parametric form ([`SuBelief`], [`SpBelief`]) and a
//! discretized form ([`DiscreteLaw`]): a finite set of weighted nodes used by
//! the allocator and the dual updates. Point masses discretize to one node.

mod activity;
mod expect;
mod kalman;
pub mod trace;
mod update;

use std::sync::Arc;

use serde::Serialize;

pub use activity::{activity_posterior, stale_activity_update};
pub use expect::{expect_over_belief, expected_sp_gain, GainBelief, QuadratureSpec};
pub use kalman::{gm_predict, kalman_correct};
pub use update::{update_beliefs, BeliefTracker};

/// Belief about an SU-to-AP gain h_{k,2}^m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SuBelief {
    PointMass {
        gain: f64,
    },
    /// Exponential law with mean `mean` restricted to `[lower, upper)`.
    TruncatedExp {
        lower: f64,
        upper: f64,
        mean: f64,
    },
}

/// Belief about an SU-to-PU gain h_{k,1}^m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpBelief {
    PointMass {
        gain: f64,
    },
    /// Low-pass channel ~ N(mean, var · I₂); the gain is its squared modulus.
    Gaussian {
        mean: [f64; 2],
        var: f64,
    },
}

/// One quadrature node of a discretized gain law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub value: f64,
    pub weight: f64,
}

/// Discretized gain law: `E[f(h)] ≈ Σ w_i f(h_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    nodes: Arc<[Node]>,
}

impl DiscreteLaw {
    pub fn point(value: f64) -> Self {
        DiscreteLaw {
            nodes: Arc::new([Node { value, weight: 1.0 }]),
        }
    }

    pub fn from_nodes(nodes: Vec<Node>) -> Self {
        DiscreteLaw { nodes: nodes.into() }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn as_point(&self) -> Option<f64> {
        match *self.nodes {
            [n] => Some(n.value),
            _ => None,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|h| h)
    }

    #[inline]
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n.value)).sum()
    }
}

/// Beliefs about the whole CSI vector for one slot. Per-link vectors are
/// channel-major (`k * M + m`).
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    /// q_k = Pr{a_{k,1} = 1}.
    pub activity: Vec<f64>,
    pub su: Vec<SuBelief>,
    pub sp: Vec<SpBelief>,
    su_laws: Vec<DiscreteLaw>,
    sp_laws: Vec<DiscreteLaw>,
    sp_means: Vec<f64>,
}

impl BeliefState {
    /// Assembles a state, discretizing every gain belief with `spec`.
    pub fn new(activity: Vec<f64>, su: Vec<SuBelief>, sp: Vec<SpBelief>, spec: QuadratureSpec) -> Self {
        let su_laws = su.iter().map(|b| b.discretize(spec)).collect();
        let sp_laws = sp.iter().map(|b| b.discretize(spec)).collect();
        Self::with_laws(activity, su, sp, su_laws, sp_laws)
    }

    pub(crate) fn with_laws(
        activity: Vec<f64>,
        su: Vec<SuBelief>,
        sp: Vec<SpBelief>,
        su_laws: Vec<DiscreteLaw>,
        sp_laws: Vec<DiscreteLaw>,
    ) -> Self {
        debug_assert_eq!(su.len(), sp.len());
        let sp_means = sp.iter().map(expected_sp_gain).collect();
        BeliefState {
            activity,
            su,
            sp,
            su_laws,
            sp_laws,
            sp_means,
        }
    }

    /// Dirac beliefs at the true CSI.
    pub fn point_masses(truth: &crate::model::CsiTrue) -> Self {
        let activity = truth.active.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        let su: Vec<_> = truth.su_gain.iter().map(|&gain| SuBelief::PointMass { gain }).collect();
        let sp: Vec<_> = truth.sp_gain.iter().map(|&gain| SpBelief::PointMass { gain }).collect();
        let su_laws = truth.su_gain.iter().map(|&h| DiscreteLaw::point(h)).collect();
        let sp_laws = truth.sp_gain.iter().map(|&h| DiscreteLaw::point(h)).collect();
        Self::with_laws(activity, su, sp, su_laws, sp_laws)
    }

    pub fn num_links(&self) -> usize {
        self.su.len()
    }

    pub fn su_law(&self, link: usize) -> &DiscreteLaw {
        &self.su_laws[link]
    }

    pub fn sp_law(&self, link: usize) -> &DiscreteLaw {
        &self.sp_laws[link]
    }

    /// E[h_{k,1}^m] in closed form.
    pub fn sp_mean(&self, link: usize) -> f64 {
        self.sp_means[link]
    }

    /// True when every belief is a point mass with q ∈ {0, 1}.
    pub fn is_deterministic(&self) -> bool {
        self.activity.iter().all(|&q| q == 0.0 || q == 1.0)
            && self.su_laws.iter().chain(&self.sp_laws).all(|l| l.as_point().is_some())
    }
}
