use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{ln_poisson_upper_tail, KernelValue};
use crate::scalar::poisson_pmf;
use crate::types::{QueueState, RateVector};

/// Finite state space `{0..cap}^N`. A transition that would push a queue
/// above `cap` is absorbed; `mass_leak_bound` records the absorbed
/// probability of the last solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CtmcTruncation {
    pub cap: i64,
    pub mass_leak_bound: f64,
}

impl CtmcTruncation {
    pub fn new(cap: i64) -> Self {
        CtmcTruncation {
            cap,
            mass_leak_bound: 0.0,
        }
    }
}

/// Transient distribution on the truncated box.
#[derive(Clone, Debug)]
pub struct Distribution {
    pub cap: i64,
    pub stations: usize,
    pub probs: Vec<f64>,
    /// `tol/2 + leak`: the true probability of any state lies in
    /// `[probs, probs + abs_error]`.
    pub abs_error: f64,
    pub leak: f64,
}

impl Distribution {
    pub fn get(&self, q: &QueueState) -> f64 {
        match index(q.values(), self.cap) {
            Some(i) => self.probs[i],
            None => 0.0,
        }
    }
}

fn index(q: &[i64], cap: i64) -> Option<usize> {
    let side = (cap + 1) as usize;
    let mut idx = 0usize;
    for &v in q.iter().rev() {
        if v < 0 || v > cap {
            return None;
        }
        idx = idx * side + v as usize;
    }
    Some(idx)
}

/// `p_t = Σ_{n ≤ K} pois(n; Λt) p₀ Pⁿ` with `P = I + Q/Λ`, `Λ = Σ_k ν_k`,
/// and `K` the first index whose Poisson tail is below `tol/2`.
pub fn uniformization_distribution(
    q: &QueueState,
    t: f64,
    nu: &RateVector,
    trunc: &mut CtmcTruncation,
    tol: f64,
) -> Result<Distribution> {
    let stations = nu.stations();
    if q.len() != stations {
        return Err(Error::Dimension {
            expected: stations,
            got: q.len(),
        });
    }
    if !(tol > 0.0) || !(t >= 0.0) || trunc.cap < 1 {
        return Err(Error::InvalidArgument(format!(
            "need tol > 0, t >= 0, cap >= 1 (got {tol}, {t}, {})",
            trunc.cap
        )));
    }
    let cap = trunc.cap;
    let start = index(q.values(), cap).ok_or_else(|| {
        Error::InvalidArgument(format!("start {:?} exceeds cap {cap}", q.values()))
    })?;
    let side = (cap + 1) as usize;
    let size = side.pow(stations as u32);
    let rates = nu.rates();
    let big = rates.iter().sum::<f64>();
    let mean = big * t;
    let mut steps = mean.ceil() as i64;
    while ln_poisson_upper_tail(mean, steps + 1) > (tol / 2.0).ln() {
        steps += 1;
    }

    let stride: Vec<usize> = (0..stations).map(|k| side.pow(k as u32)).collect();
    let coords = |s: usize| -> Vec<i64> { (0..stations).map(|k| ((s / stride[k]) % side) as i64).collect() };

    let mut p = vec![0.0; size];
    p[start] = 1.0;
    let mut acc = vec![0.0; size];
    // absorbed mass after n steps, and its Poisson mixture
    let mut sunk = 0.0;
    let mut leak = 0.0;
    for n in 0..=steps {
        let w = poisson_pmf(n as u64, mean);
        acc.par_iter_mut().zip(&p).for_each(|(a, v)| *a += w * v);
        leak += w * sunk;
        if n == steps {
            break;
        }
        // one step of P, gathered per destination
        let next: Vec<f64> = (0..size)
            .into_par_iter()
            .map(|s| {
                let x = coords(s);
                let mut out_rate = rates[0];
                for j in 0..stations {
                    if x[j] > 0 {
                        out_rate += rates[j + 1];
                    }
                }
                let mut v = p[s] * (1.0 - out_rate / big);
                if x[0] > 0 {
                    v += p[s - stride[0]] * rates[0] / big;
                }
                for j in 0..stations {
                    // from x + e_j − e_{j+1}: a service completion at j
                    if x[j] == cap {
                        continue;
                    }
                    if j + 1 < stations {
                        if x[j + 1] > 0 {
                            v += p[s + stride[j] - stride[j + 1]] * rates[j + 1] / big;
                        }
                    } else {
                        v += p[s + stride[j]] * rates[j + 1] / big;
                    }
                }
                v
            })
            .collect();
        // mass absorbed this step: moves that would exceed the cap
        for (s, v) in p.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let x = coords(s);
            let mut rate = if x[0] == cap { rates[0] } else { 0.0 };
            for j in 0..stations.saturating_sub(1) {
                if x[j] > 0 && x[j + 1] == cap {
                    rate += rates[j + 1];
                }
            }
            sunk += v * rate / big;
        }
        p = next;
    }
    trunc.mass_leak_bound = leak;
    Ok(Distribution {
        cap,
        stations,
        probs: acc,
        abs_error: tol / 2.0 + leak,
        leak,
    })
}

/// `k^ν_t(q, q′)` on the truncated chain, see [`uniformization_distribution`].
/// Fails when the absorbed mass pushes the error bound above `tol`.
pub fn uniformization_kt(
    q: &QueueState,
    q2: &QueueState,
    t: f64,
    nu: &RateVector,
    trunc: &mut CtmcTruncation,
    tol: f64,
) -> Result<KernelValue<f64>> {
    if q2.values().iter().any(|&v| v > trunc.cap) {
        return Err(Error::InvalidArgument(format!(
            "target {:?} exceeds cap {}",
            q2.values(),
            trunc.cap
        )));
    }
    let d = uniformization_distribution(q, t, nu, trunc, tol)?;
    if d.abs_error > tol {
        return Err(Error::ToleranceUnachievable {
            requested: tol,
            achieved: d.abs_error,
        });
    }
    Ok(KernelValue {
        value: d.get(q2),
        abs_error: d.abs_error,
    })
}
