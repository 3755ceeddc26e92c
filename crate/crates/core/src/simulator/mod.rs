//! Independent oracles for the analytic paths: Monte Carlo simulation of the
//! network and of the Poisson processes, and uniformization of the
//! queue-length chain on a finite box.

mod montecarlo;
mod uniformization;

pub use montecarlo::{simulate_noncrossing, simulate_queue_prob};
pub use uniformization::{uniformization_distribution, uniformization_kt, CtmcTruncation, Distribution};

use crate::error::{Error, Result};
use crate::types::RateVector;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub replications: u64,
    /// Largest time the configuration may be asked to simulate to.
    pub horizon: f64,
    pub rates: RateVector,
}

impl SimConfig {
    pub fn new(rates: RateVector, seed: u64, replications: u64, horizon: f64) -> Result<Self> {
        let cfg = SimConfig {
            seed,
            replications,
            horizon,
            rates,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidArgument("replications must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {}", self.horizon)));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        self.validate()?;
        if !(t > 0.0 && t <= self.horizon) {
            return Err(Error::InvalidArgument(format!(
                "time {t} outside (0, horizon = {}]",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Sample mean of a 0/1 indicator with a normal-approximation 95% half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub replications: u64,
}

impl Estimate {
    pub fn from_hits(hits: u64, replications: u64) -> Self {
        let n = replications as f64;
        let mean = hits as f64 / n;
        let var = if replications > 1 {
            mean * (1.0 - mean) * n / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            half_width_95: Z95 * (var / n).sqrt(),
            replications,
        }
    }

    /// `|mean − value| ≤ k σ`, with `σ` the standard error.
    pub fn within_sigmas(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.half_width_95 / Z95
    }
}
