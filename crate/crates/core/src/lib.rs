//! Resource allocation for underlay cognitive radios.
//!
//! Secondary users (SUs) share K primary-user (PU) channels. Each slot the
//! access point picks at most one SU per channel and its power, trading SU
//! weighted sum-rate against long-term limits on the interference received
//! by active PUs and on their capacity loss. The long-term constraints are
//! dualized and tracked with stochastic multipliers; imperfect CSI enters
//! through per-entity beliefs.

pub mod allocator;
pub mod beliefs;
pub mod config;
pub mod duals;
pub mod engine;
pub mod error;
pub mod model;
pub mod oracles;
pub mod quadrature;
pub mod selftest;

pub use beliefs::{BeliefState, BeliefTracker, QuadratureSpec, SpBelief, SuBelief};
pub use config::{CsiVariant, ScenarioConfig, Scheme};
pub use error::{Error, Result};
pub use model::{CsiObservation, CsiTrue};
