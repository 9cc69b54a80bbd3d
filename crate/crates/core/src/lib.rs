//! Slotted-time simulation and exact analysis of status-update policies that
//! track a Markov source over an erasure channel, plus a small library of
//! information measures for reasoning about the value of samples.

pub mod engine;
pub mod error;
mod linalg;
pub mod model;
pub mod oracle;
pub mod protocol;
pub mod rng;
pub mod semantics;

pub use engine::{Metrics, RunOutput, RunSummary, SimConfig};
pub use error::{Error, Result};
pub use linalg::stationary_residual;
pub use model::{CostMatrix, ErasureChannel, MarkovSource};
pub use protocol::{PolicyKind, PolicyName};
