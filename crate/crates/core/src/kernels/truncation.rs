use crate::error::{Error, Result};
use crate::scalar::poisson_pmf;

/// Widest per-coordinate range any lattice sum will use.
pub const MAX_BOX_WIDTH: i64 = 200_000;

/// Upper corner of a truncated lattice sum together with a rigorous bound on
/// the probability mass left outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationBox {
    pub upper: Vec<i64>,
    pub tail_bound: f64,
}

/// Chernoff bound on `ln P(Pois(λ) ≥ k)`; zero (in log: 0) when `k ≤ λ`.
pub fn ln_poisson_upper_tail(lambda: f64, k: i64) -> f64 {
    if k <= 0 {
        return 0.0;
    }
    if lambda == 0.0 {
        return f64::NEG_INFINITY;
    }
    let k = k as f64;
    if k <= lambda {
        return 0.0;
    }
    (-lambda + k * (1.0 + lambda.ln() - k.ln())).min(0.0)
}

impl TruncationBox {
    /// `M_k = x_k + ⌈λ_k + c√λ_k + c²⌉`, growing `c` until
    /// `Σ_k P(Pois(λ_k) > M_k − x_k) < tol`.
    pub fn poisson(start: &[i64], means: &[f64], tol: f64) -> Result<Self> {
        let mut c = 0.5;
        loop {
            let widths: Vec<i64> = means
                .iter()
                .map(|&l| (l + c * l.sqrt() + c * c).ceil() as i64)
                .collect();
            let tail: f64 = widths
                .iter()
                .zip(means)
                .map(|(&w, &l)| ln_poisson_upper_tail(l, w + 1).exp())
                .sum();
            let too_wide = widths.iter().any(|&w| w > MAX_BOX_WIDTH);
            if tail < tol && !too_wide {
                return Ok(TruncationBox {
                    upper: start.iter().zip(&widths).map(|(x, w)| x + w).collect(),
                    tail_bound: tail,
                });
            }
            if too_wide {
                return Err(Error::ToleranceUnachievable {
                    requested: tol,
                    achieved: tail,
                });
            }
            c += 0.5;
        }
    }
}

/// One coordinate of a dominating product `∏_k g_k(u_k)` for a lattice sum
/// in the displacements `u_k ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    /// `u_k` is pinned; contributes the constant `g`.
    Fixed { g: f64 },
    /// `g(u) = pois(u; λ) r^{u+s} (u+c)^p` with `r ≥ 1`, `c ≥ 1`.
    Tilted {
        lambda: f64,
        r: f64,
        s: f64,
        c: f64,
        p: f64,
    },
}

impl Factor {
    fn ln_g(&self, u: i64) -> f64 {
        match *self {
            Factor::Fixed { g } => g.ln(),
            Factor::Tilted { lambda, r, s, c, p } => {
                let pois = poisson_pmf(u as u64, lambda).ln();
                let poly = if p == 0.0 { 0.0 } else { p * (u as f64 + c).ln() };
                pois + (u as f64 + s) * r.ln() + poly
            }
        }
    }

    /// Upper bound on `g(u+1)/g(u)`, decreasing in `u`.
    fn ratio(&self, u: i64) -> f64 {
        match *self {
            Factor::Fixed { .. } => 0.0,
            Factor::Tilted { lambda, r, c, p, .. } => {
                let u = u as f64;
                lambda * r / (u + 1.0) * ((u + 1.0 + c) / (u + c)).powf(p)
            }
        }
    }
}

/// Log-domain prefix data for one tilted coordinate.
struct Profile {
    /// `ln g(u)` for `u = 0..len`.
    ln_g: Vec<f64>,
    /// `ln Σ_{u ≥ len} g(u)` (geometric bound).
    ln_rest: f64,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn profile(f: &Factor) -> Result<Profile> {
    let mut ln_g = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut u = 0i64;
    loop {
        let lg = f.ln_g(u);
        ln_g.push(lg);
        peak = peak.max(lg);
        let rho = f.ratio(u);
        if rho < 0.5 && lg < peak - 200.0 {
            let rest = lg + (rho / (1.0 - rho)).ln();
            return Ok(Profile { ln_g, ln_rest: rest });
        }
        u += 1;
        if u > MAX_BOX_WIDTH {
            return Err(Error::ToleranceUnachievable {
                requested: 0.0,
                achieved: f64::INFINITY,
            });
        }
    }
}

/// Widths `U_k` such that the mass of `∏ g_k(u_k)` outside
/// `{u : u_k ≤ U_k for every tilted k}` is below `tol`, by the union bound
/// `Σ_k tail_k(U_k) ∏_{l≠k} total_l`. Returns the widths (0 for fixed
/// coordinates) and the bound achieved.
pub fn dominated_box(factors: &[Factor], tol: f64) -> Result<(Vec<i64>, f64)> {
    let mut profiles = Vec::with_capacity(factors.len());
    let mut ln_totals = Vec::with_capacity(factors.len());
    for f in factors {
        match f {
            Factor::Fixed { g } => {
                profiles.push(None);
                ln_totals.push(g.ln());
            }
            Factor::Tilted { .. } => {
                let p = profile(f)?;
                let total = p.ln_g.iter().fold(p.ln_rest, |acc, &v| log_add(acc, v));
                ln_totals.push(total);
                profiles.push(Some(p));
            }
        }
    }
    let free = profiles.iter().filter(|p| p.is_some()).count().max(1) as f64;
    let ln_all: f64 = ln_totals.iter().sum();
    let ln_budget = (tol / free).ln();
    let mut widths = vec![0; factors.len()];
    let mut bound = 0.0;
    for (k, p) in profiles.iter().enumerate() {
        let Some(p) = p else { continue };
        let ln_others = ln_all - ln_totals[k];
        // tail(U) = Σ_{u>U} g(u), accumulated from the top
        let mut tail = p.ln_rest;
        let mut width = p.ln_g.len() as i64 - 1;
        let mut chosen = (width, tail);
        while width >= 0 {
            if tail + ln_others > ln_budget {
                break;
            }
            chosen = (width, tail);
            tail = log_add(tail, p.ln_g[width as usize]);
            width -= 1;
        }
        if chosen.1 + ln_others > ln_budget {
            return Err(Error::ToleranceUnachievable {
                requested: tol,
                achieved: (chosen.1 + ln_others).exp() * free,
            });
        }
        widths[k] = chosen.0;
        bound += (chosen.1 + ln_others).exp();
    }
    Ok((widths, bound))
}
