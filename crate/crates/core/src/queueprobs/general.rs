use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{chamber_box, dominated_box, pi_q_support, Factor, KernelValue, KmTable, LambdaTable, PiTable};
use crate::kernels::{check_points, check_tol};
use crate::scalar::{Exact, Real};
use crate::types::{QueueState, RateVector};

use super::nonzero;

/// `k^ν_t(q, q′) = Σ_z Π^ν_Q(q, z) Σ_{z′ ≥ z} P^ν_t(z, z′) Λ^ν_Q(z′, q′)`.
///
/// The `z` sum runs over the finite support of `Π^ν_Q(q, ·)` with exact
/// coefficients. For each `z` the `z′` sum is truncated to a box chosen from
/// `P^ν_t(z, z′) ≤ ∏_k pois(u_k; ν_k t)` and
/// `Λ^ν_Q(z′, q′) ≤ ∏_{i<N} (u_i + z_i − z_N + N)^{N−i} ∏_k (ν_max/ν_k)^{u_k + z_k − z_N}`,
/// `u = z′ − z`; the mass outside is the reported error.
pub fn kt_general<R: Real>(
    q: &QueueState,
    q2: &QueueState,
    t: &R,
    nu: &RateVector,
    tol: f64,
) -> Result<KernelValue<R>> {
    check_states(nu, &[q, q2])?;
    let rates: Vec<R> = nu.scalars();
    let target = q2.lift(0).into_inner();
    intertwined(q, t, nu, tol, |gaps: &[i64], table: &LambdaTable<R>| {
        table.eval(gaps, &target)
    }, &rates)
}

/// `k^ν_t(q, 0)` for a network whose rates all equal `ν`, using
/// `Λ_Q(z, 0) = ∏_{0≤i<j≤N−1} (z_i − z_j − i + j)/(j − i)`, the number of GT
/// patterns with shape `z` and constant left edge.
pub fn kt_equal_rates_to_empty<R: Real>(
    q: &QueueState,
    t: &R,
    rate: &Exact,
    tol: f64,
) -> Result<KernelValue<R>> {
    let nu = RateVector::from_exact(vec![rate.clone(); q.len() + 1])?;
    check_states(&nu, &[q])?;
    intertwined(q, t, &nu, tol, |gaps: &[i64], _: &LambdaTable<R>| {
        R::from_rational(&equal_rates_lambda(gaps))
    }, &nu.scalars())
}

/// `∏_{0≤i<j≤N−1} (g_i − g_j − i + j)/(j − i)`.
pub(crate) fn equal_rates_lambda(g: &[i64]) -> Exact {
    let stations = g.len() - 1;
    let mut num = num_bigint::BigInt::from(1);
    let mut den = num_bigint::BigInt::from(1);
    for i in 0..stations {
        for j in i + 1..stations {
            num *= g[i] - g[j] - i as i64 + j as i64;
            den *= (j - i) as i64;
        }
    }
    Exact::new(num, den)
}

fn check_states(nu: &RateVector, qs: &[&QueueState]) -> Result<()> {
    for q in qs {
        if q.len() != nu.stations() {
            return Err(Error::Dimension {
                expected: nu.stations(),
                got: q.len(),
            });
        }
    }
    Ok(())
}

struct Start {
    z: Vec<i64>,
    coeff: Exact,
    hi: Vec<i64>,
    bound: f64,
}

fn intertwined<R: Real>(
    q: &QueueState,
    t: &R,
    nu: &RateVector,
    tol: f64,
    lambda_q: impl Fn(&[i64], &LambdaTable<R>) -> R + Sync,
    rates: &[R],
) -> Result<KernelValue<R>> {
    check_tol(tol)?;
    if !(t.to_f64() > 0.0) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {}", t.to_f64())));
    }
    let n = nu.len();
    let top = n - 1;
    let exact: Vec<Exact> = nu.scalars();
    let pi = PiTable::new(&exact);
    let from = q.lift(0);
    let mut starts: Vec<Start> = pi_q_support(q)
        .into_iter()
        .filter_map(|z| {
            let c = pi.eval(from.coords(), z.coords());
            nonzero(&c).then(|| Start {
                z: z.into_inner(),
                coeff: c,
                hi: Vec::new(),
                bound: 0.0,
            })
        })
        .collect();
    let weight: f64 = starts
        .iter()
        .map(|s| s.coeff.abs().to_f64().unwrap_or(f64::INFINITY))
        .sum();
    let nu_max = nu.max_rate();
    let tf = t.to_f64();
    for s in &mut starts {
        let factors: Vec<Factor> = (0..n)
            .map(|k| {
                let lambda = nu.rate(k) * tf;
                if k == top {
                    Factor::Tilted { lambda, r: 1.0, s: 0.0, c: 1.0, p: 0.0 }
                } else {
                    Factor::Tilted {
                        lambda,
                        r: nu_max / nu.rate(k),
                        s: (s.z[k] - s.z[top]) as f64,
                        c: (s.z[k] - s.z[top] + top as i64) as f64,
                        p: (top - k) as f64,
                    }
                }
            })
            .collect();
        let (widths, bound) = dominated_box(&factors, tol / weight)?;
        s.hi = (0..n).map(|k| s.z[k] + widths[k]).collect();
        s.bound = bound;
        check_points(&s.z, &s.hi, bound, tol)?;
    }

    // Λ_Q(z′, q′) depends on z′ only through the gaps z′ − z′_N.
    let mut gap_hi = vec![0i64; n];
    for s in &starts {
        for k in 0..n {
            gap_hi[k] = gap_hi[k].max(s.hi[k] - s.z[top]);
        }
    }
    let degree = (gap_hi[0] + n as i64).max(0) as usize;
    let table = LambdaTable::new(rates, degree);
    let gap_points: Vec<Vec<i64>> = chamber_box(&vec![0; n], &gap_hi).collect();
    let lambda_cache: HashMap<Vec<i64>, R> = gap_points
        .into_par_iter()
        .filter_map(|g| {
            let v = lambda_q(&g, &table);
            (!v.is_zero()).then_some((g, v))
        })
        .collect();

    let max_degree = starts
        .iter()
        .map(|s| s.hi[0] - s.z[top] + n as i64)
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    let km = KmTable::new(rates, t, max_degree);
    let parts: Vec<R> = starts
        .par_iter()
        .map(|s| {
            let scales = km.scales(&s.z);
            let mut inner = R::zero();
            let mut gaps = vec![0i64; n];
            for zp in chamber_box(&s.z, &s.hi) {
                for k in 0..n {
                    gaps[k] = zp[k] - zp[top];
                }
                let Some(l) = lambda_cache.get(&gaps) else { continue };
                inner = inner + km.eval(&s.z, &zp, &scales) * l.clone();
            }
            R::from_rational(&s.coeff) * inner
        })
        .collect();
    let value = parts.into_iter().fold(R::zero(), |a, b| a + b);
    let abs_error = starts
        .iter()
        .map(|s| s.coeff.abs().to_f64().unwrap_or(f64::INFINITY) * s.bound)
        .sum();
    Ok(KernelValue { value, abs_error })
}
