use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use super::{Estimate, SimConfig};
use crate::error::{Error, Result};
use crate::types::{QueueState, WeylPoint};

/// Replications per parallel chunk; hit counts are integers, so the total is
/// independent of how chunks are scheduled.
const CHUNK: u64 = 4096;

/// Generator for replication `rep`: stream `rep` of the ChaCha key derived
/// from `seed`.
fn stream(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

fn count_hits(cfg: &SimConfig, hit: impl Fn(&mut ChaCha8Rng) -> bool + Sync) -> Estimate {
    let n = cfg.replications;
    let chunks = n.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(n))
                .filter(|&rep| hit(&mut stream(cfg.seed, rep)))
                .count() as u64
        })
        .sum();
    Estimate::from_hits(hits, n)
}

/// Monte Carlo estimate of `k^ν_t(q, q′)`: Poisson(ν₀) arrivals to station 1,
/// exponential(ν_j) service at each busy station `j`, departures from
/// station `j` joining station `j+1`.
pub fn simulate_queue_prob(q: &QueueState, q2: &QueueState, t: f64, cfg: &SimConfig) -> Result<Estimate> {
    cfg.check_time(t)?;
    let stations = cfg.rates.stations();
    for s in [q, q2] {
        if s.len() != stations {
            return Err(Error::Dimension {
                expected: stations,
                got: s.len(),
            });
        }
    }
    let rates = cfg.rates.rates().to_vec();
    let start = q.values().to_vec();
    let target = q2.values();
    Ok(count_hits(cfg, |rng| {
        let mut state = start.clone();
        let mut clock = 0.0;
        loop {
            let total: f64 = rates[0]
                + (0..stations)
                    .filter(|&j| state[j] > 0)
                    .map(|j| rates[j + 1])
                    .sum::<f64>();
            let wait: f64 = rng.sample(Exp1);
            clock += wait / total;
            if clock > t {
                return state == target;
            }
            let mut pick = rng.random::<f64>() * total;
            if pick < rates[0] {
                state[0] += 1;
                continue;
            }
            pick -= rates[0];
            let mut chosen = None;
            for j in (0..stations).filter(|&j| state[j] > 0) {
                chosen = Some(j);
                if pick < rates[j + 1] {
                    break;
                }
                pick -= rates[j + 1];
            }
            let j = chosen.expect("total rate includes a busy station");
            state[j] -= 1;
            if j + 1 < stations {
                state[j + 1] += 1;
            }
        }
    }))
}

/// Monte Carlo estimate of `P^ν_x(T > t)` for independent Poisson processes
/// started at `x`; the chamber can only be left at a jump, when a process
/// overtakes its predecessor.
pub fn simulate_noncrossing(x: &WeylPoint, t: f64, cfg: &SimConfig) -> Result<Estimate> {
    cfg.check_time(t)?;
    let n = cfg.rates.len();
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    if n == 1 {
        return Ok(Estimate {
            mean: 1.0,
            half_width_95: 0.0,
            replications: cfg.replications,
        });
    }
    let rates = cfg.rates.rates().to_vec();
    let total: f64 = rates.iter().sum();
    let start = x.coords().to_vec();
    Ok(count_hits(cfg, |rng| {
        let mut pos = start.clone();
        let mut clock = 0.0;
        loop {
            let wait: f64 = rng.sample(Exp1);
            clock += wait / total;
            if clock > t {
                return true;
            }
            let mut pick = rng.random::<f64>() * total;
            let mut k = n - 1;
            for (i, r) in rates.iter().enumerate() {
                if pick < *r {
                    k = i;
                    break;
                }
                pick -= r;
            }
            pos[k] += 1;
            if k > 0 && pos[k] > pos[k - 1] {
                return false;
            }
        }
    }))
}
