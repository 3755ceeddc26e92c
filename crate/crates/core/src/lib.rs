//! Transient transition probabilities of series Jackson networks.

pub mod asymptotics;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod queueprobs;
pub mod scalar;
pub mod simulator;
pub mod symfunc;
pub mod types;

pub use error::{Error, Result};
pub use scalar::{Exact, Hp, Real, Scalar};
pub use types::{QueueState, RateVector, WeylPoint};
