//! Large-time behaviour of `k^ν_t(0,0)`: the Poisson rate function, the
//! exponential decay rate of each permutation term, the dominant term and
//! the relaxation time, and slope fits of computed series.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::queueprobs::{kt00_excess32, terms_sum32};
use crate::scalar::{Exact, Real, Scalar};
use crate::types::{RateVector, EPS_DISTINCT};

/// Values below this are treated as numerical noise by the slope fit.
pub const DEFAULT_FLOOR: f64 = 1e-11;

/// Fewest points a slope fit accepts.
pub const MIN_FIT_POINTS: usize = 4;

/// `I_ν(x) = Σ_k [x_k log(x_k/ν_k) − x_k + ν_k]` on the nonnegative orthant
/// (with `0 log 0 = 0`), `+∞` elsewhere.
///
/// # Panics
/// If `x` and `nu` have different lengths.
pub fn rate_function(x: &[f64], nu: &RateVector) -> f64 {
    assert_eq!(x.len(), nu.len(), "rate_function: dimension mismatch");
    let mut total = 0.0;
    for (&xk, &vk) in x.iter().zip(nu.rates()) {
        if xk < 0.0 || xk.is_nan() {
            return f64::INFINITY;
        }
        let entropy = if xk == 0.0 { 0.0 } else { xk * (xk / vk).ln() };
        total += entropy - xk + vk;
    }
    total
}

/// Lower bound `inf_{x_j = x_N} I_{σ(ν)}` for one term `σ(N) ≠ 0`, with
/// `j = σ⁻¹(0)`, and the hyperplane minimizer `ν*(σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneBound {
    pub sigma: Vec<usize>,
    pub value: f64,
    pub minimizer: Vec<f64>,
    /// `ν*(σ) ∈ W^N_R`, in which case the bound is the chamber infimum.
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChamberInfimum {
    pub value: f64,
    pub argmin: Vec<f64>,
    pub sigma: Vec<usize>,
    pub bounds: Vec<HyperplaneBound>,
}

/// `min_{σ(N)≠0} inf_{x ∈ W^N_R} I_{σ(ν)}(x)`, the slowest exponential rate
/// among the terms of the stationary-form permutation sum.
///
/// Each term is bounded below by its hyperplane infimum
/// `ν₀ + σ(ν)_N − 2√(ν₀ σ(ν)_N)`, attained exactly when `ν*(σ)` lies in the
/// chamber; the minimum over feasible terms is returned.
pub fn chamber_infimum(nu: &RateVector) -> Result<ChamberInfimum> {
    nu.require_distinct(EPS_DISTINCT)?;
    let n = nu.stations();
    let nu0 = nu.rate(0);
    let bounds: Vec<HyperplaneBound> = crate::types::permutations(n + 1)
        .filter(|s| s[n] != 0)
        .map(|sigma| {
            let lam: Vec<f64> = sigma.iter().map(|&k| nu.rate(k)).collect();
            let j = sigma.iter().position(|&k| k == 0).unwrap();
            let mid = (nu0 * lam[n]).sqrt();
            let mut minimizer = lam.clone();
            minimizer[j] = mid;
            minimizer[n] = mid;
            let feasible = minimizer.windows(2).all(|w| w[0] >= w[1]);
            HyperplaneBound {
                value: nu0 + lam[n] - 2.0 * mid,
                minimizer,
                feasible,
                sigma,
            }
        })
        .collect();
    let best = bounds
        .iter()
        .filter(|b| b.feasible)
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::InvalidArgument("no term has a feasible hyperplane minimizer".into()))?;
    Ok(ChamberInfimum {
        value: best.value,
        argmin: best.minimizer.clone(),
        sigma: best.sigma.clone(),
        bounds: bounds.clone(),
    })
}

/// `inf_{x ∈ W^N_R} I_λ(x)` by projected coordinate descent in the gap
/// variables `g_k = x_k − x_{k+1} ≥ 0` (`g_N = x_N`), which turn the chamber
/// into the orthant. Stops when the projected gradient norm is below `gtol`.
pub fn chamber_minimum_numeric(lambda: &RateVector, gtol: f64) -> (f64, Vec<f64>) {
    let lam = lambda.rates();
    let n = lam.len();
    // start from the nonincreasing rearrangement of λ
    let mut start = lam.to_vec();
    start.sort_by(|a, b| b.total_cmp(a));
    let mut g: Vec<f64> = (0..n)
        .map(|k| if k + 1 < n { start[k] - start[k + 1] } else { start[k] })
        .collect();
    let coords = |g: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; n];
        let mut acc = 0.0;
        for k in (0..n).rev() {
            acc += g[k];
            x[k] = acc;
        }
        x
    };
    // ∂I/∂g_k = Σ_{i ≤ k} log(x_i/λ_i)
    let grad = |x: &[f64], k: usize| -> f64 { (0..=k).map(|i| (x[i] / lam[i]).ln()).sum() };
    for _ in 0..100_000 {
        for k in 0..n {
            // minimize over g_k ≥ 0 by bisection on the monotone derivative
            let mut lo = 0.0;
            let mut hi = g[k].max(1.0);
            let at = |v: f64, g: &mut Vec<f64>| {
                g[k] = v;
                grad(&coords(g), k)
            };
            while at(hi, &mut g) < 0.0 {
                hi *= 2.0;
            }
            let floor_slope = at(lo, &mut g);
            if floor_slope >= 0.0 && floor_slope.is_finite() {
                g[k] = 0.0;
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if at(mid, &mut g) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-16 * hi {
                    break;
                }
            }
            g[k] = 0.5 * (lo + hi);
        }
        let x = coords(&g);
        let projected: f64 = (0..n)
            .map(|k| {
                let d = grad(&x, k);
                if g[k] <= 0.0 {
                    d.min(0.0)
                } else {
                    d
                }
            })
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt();
        if projected < gtol {
            break;
        }
    }
    let x = coords(&g);
    (rate_function(&x, lambda), x)
}

/// `1/(ν₀ + ν₍₁₎ − 2√(ν₀ν₍₁₎))` with `ν₍₁₎ = min_j ν_j`.
pub fn relaxation_time(nu: &RateVector) -> Result<f64> {
    nu.require_stable()?;
    nu.require_distinct(EPS_DISTINCT)?;
    let nu0 = nu.rate(0);
    let slow = bottleneck(nu).1;
    Ok(1.0 / (nu0 + slow - 2.0 * (nu0 * slow).sqrt()))
}

/// Station index `j ≥ 1` and rate of the slowest server.
pub fn bottleneck(nu: &RateVector) -> (usize, f64) {
    (1..nu.len())
        .map(|j| (j, nu.rate(j)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one station")
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominantTerm {
    pub prefactor: f64,
    pub prefactor_exact: Exact,
    /// `σ̄` with `σ̄(ν) = (ν₍N₎, …, ν₍₂₎, ν₀, ν₍₁₎)`.
    pub sigma: Vec<usize>,
    pub rates: RateVector,
}

/// `ρ₍₁₎/∏_{1≤i<j≤N}(1 − ν₍ᵢ₎/ν₍ⱼ₎)` and the dominant arrangement.
pub fn dominant_prefactor(nu: &RateVector) -> Result<DominantTerm> {
    nu.require_stable()?;
    nu.require_distinct(EPS_DISTINCT)?;
    let n = nu.stations();
    let exact = nu.exact();
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by(|&a, &b| exact[a].cmp(&exact[b]));
    let one = <Exact as Scalar>::one();
    let mut denom = one.clone();
    for i in 0..n {
        for j in i + 1..n {
            denom *= one.clone() - &exact[order[i]] / &exact[order[j]];
        }
    }
    let prefactor_exact = &exact[0] / &exact[order[0]] / denom;
    let mut sigma: Vec<usize> = order[1..].iter().rev().copied().collect();
    sigma.push(0);
    sigma.push(order[0]);
    Ok(DominantTerm {
        prefactor: prefactor_exact.to_f64().unwrap_or(f64::NAN),
        prefactor_exact,
        rates: nu.permuted(&sigma),
        sigma,
    })
}

fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for &(t, v) in points {
        sxy += (t - mt) * (v.ln() - my);
        sxx += (t - mt) * (t - mt);
    }
    sxy / sxx
}

/// `−slope` of the least-squares line through `(t, log v)` over the points
/// with `v > floor`.
pub fn fit_decay_rate(series: &[(f64, f64)], floor: f64) -> Result<f64> {
    let usable: Vec<(f64, f64)> = series.iter().copied().filter(|p| p.1 > floor).collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            usable: usable.len(),
            needed: MIN_FIT_POINTS,
            floor,
        });
    }
    Ok(-regression_slope(&usable))
}

/// Longest run of consecutive points with `floor ≤ v ≤ 0.1·v₀`, `v₀` the
/// first value of the series; returns the index range.
pub fn auto_window(series: &[(f64, f64)], floor: f64) -> Result<std::ops::Range<usize>> {
    let Some(first) = series.first() else {
        return Err(Error::InsufficientData {
            usable: 0,
            needed: MIN_FIT_POINTS,
            floor,
        });
    };
    let ceiling = 0.1 * first.1;
    let mut best = 0..0;
    let mut start = None;
    for (i, p) in series.iter().enumerate() {
        let ok = p.1 >= floor && p.1 <= ceiling;
        match (ok, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if i - s > best.len() {
                    best = s..i;
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        if series.len() - s > best.len() {
            best = s..series.len();
        }
    }
    if best.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            usable: best.len(),
            needed: MIN_FIT_POINTS,
            floor,
        });
    }
    Ok(best)
}

/// `(t, |k_t(0,0) − π₀|)` on a time grid, computed in `R`.
pub fn decay_series<R: Real>(nu: &RateVector, times: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    times
        .iter()
        .map(|&t| {
            let v = kt00_excess32(&R::from_f64(t), nu, tol)?;
            Ok((t, v.value.abs().to_f64()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub analytic_rate: f64,
    pub fitted_rate: f64,
    pub fit_window: (f64, f64),
    pub prefactor: f64,
    pub dominant_sigma: Vec<usize>,
}

/// Analytic decay rate and prefactor next to a slope fit of a computed
/// series over its auto-selected window.
pub fn decay_report(nu: &RateVector, series: &[(f64, f64)], floor: f64) -> Result<DecayReport> {
    let dom = dominant_prefactor(nu)?;
    let window = auto_window(series, floor)?;
    let points = &series[window];
    let fitted_rate = fit_decay_rate(points, floor)?;
    Ok(DecayReport {
        analytic_rate: 1.0 / relaxation_time(nu)?,
        fitted_rate,
        fit_window: (points[0].0, points[points.len() - 1].0),
        prefactor: dom.prefactor,
        dominant_sigma: dom.sigma,
    })
}

/// Coefficient of the dominant arrangement in the stationary-form term list;
/// equals the prefactor.
pub fn dominant_coefficient(nu: &RateVector) -> Result<Exact> {
    let dom = dominant_prefactor(nu)?;
    terms_sum32(nu)?
        .into_iter()
        .find(|term| term.sigma == dom.sigma)
        .map(|term| term.coefficient)
        .ok_or_else(|| Error::InvalidArgument("dominant arrangement missing from term list".into()))
}
