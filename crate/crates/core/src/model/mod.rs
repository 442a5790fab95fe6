//! Ground-truth channel and activity processes, sensing, and rate functions.

pub mod channel;
pub mod quantizer;
pub mod rates;
pub mod sensing;

pub use channel::{step_channel, CsiTrue, ModelState};
pub use quantizer::Quantizer;
pub use rates::{pu_rate, pu_rate_dx, su_rate, su_rate_dp};
pub use sensing::{sense, CsiObservation, Sensor, SuReport};

/// Random source used throughout the simulator.
pub type SimRng = rand_chacha::ChaCha8Rng;
