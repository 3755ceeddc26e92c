//! Benchmark fixtures shared by the criterion benches.

use tandem_core::RateVector;

/// Rate vectors used across benches, from one to three stations.
pub fn fixtures() -> Vec<(&'static str, RateVector)> {
    ["1,2", "1,2,4", "1,4,2,3"]
        .into_iter()
        .map(|s| (s, RateVector::parse(s).expect("valid rates")))
        .collect()
}
