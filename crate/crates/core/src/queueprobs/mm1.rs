use crate::scalar::ln_factorial;

/// Arguments up to this use the power series; beyond it, Miller's downward
/// recurrence.
const SERIES_LIMIT: f64 = 50.0;

/// `e^{−x} I_ℓ(x)` for `ℓ = 0..=max_order`, `x ≥ 0`.
pub fn scaled_bessel_i(max_order: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; max_order + 1];
        out[0] = 1.0;
        return out;
    }
    if x <= SERIES_LIMIT {
        (0..=max_order).map(|d| series(d as u64, x)).collect()
    } else {
        miller(max_order, x)
    }
}

/// `Σ_k (x/2)^{d+2k} / (k!(d+k)!)` times `e^{−x}`, term by term in logs.
fn series(d: u64, x: f64) -> f64 {
    let lh = (x / 2.0).ln();
    let mut sum = 0.0;
    let mut k = 0u64;
    loop {
        let lt = (d + 2 * k) as f64 * lh - ln_factorial(k) - ln_factorial(d + k) - x;
        let term = lt.exp();
        sum += term;
        if k as f64 > x && (term <= 1e-18 * sum || term == 0.0) {
            return sum;
        }
        k += 1;
    }
}

/// Downward recurrence `I_{k−1} = I_{k+1} + (2k/x) I_k` from far above the
/// requested orders, normalized by `I₀ + 2Σ_{k≥1} I_k = e^x`.
fn miller(max_order: usize, x: f64) -> Vec<f64> {
    let top = (max_order as f64).max(x) + 10.0 * x.sqrt() + 40.0;
    let top = top.ceil() as usize;
    let mut vals = vec![0.0; top + 2];
    vals[top] = 1e-300;
    for k in (1..=top).rev() {
        vals[k - 1] = vals[k + 1] + (2.0 * k as f64 / x) * vals[k];
        if vals[k - 1] > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals[1..=top].iter().sum::<f64>();
    vals.truncate(max_order + 1);
    vals.resize(max_order + 1, 0.0);
    vals.iter().map(|v| v / norm).collect()
}

/// Transition probability `k_t(q, q′)` of the M/M/1 queue with arrival rate
/// `ν₀` and service rate `ν₁`:
/// `e^{−(ν₀+ν₁)t}[ρ^{(q′−q)/2} I_{q′−q} + ρ^{(q′−q−1)/2} I_{q+q′+1}
///  + (1−ρ) ρ^{q′} Σ_{ℓ ≥ q+q′+2} ρ^{−ℓ/2} I_ℓ]`, all at `x = 2√(ν₀ν₁) t`.
pub fn mm1_kt(q: u64, q2: u64, t: f64, nu0: f64, nu1: f64) -> f64 {
    if t <= 0.0 {
        return (q == q2) as u64 as f64;
    }
    let rho = nu0 / nu1;
    let x = 2.0 * (nu0 * nu1).sqrt() * t;
    // e^{−(ν₀+ν₁)t} I_ℓ(x) = e^{−(√ν₀−√ν₁)² t} · e^{−x} I_ℓ(x)
    let damp = (-(nu0.sqrt() - nu1.sqrt()).powi(2) * t).exp();
    let first = (q + q2 + 2) as usize;
    let ln_rho = rho.ln();
    let mut len = first + (x + 10.0 * x.sqrt() + 40.0).ceil() as usize;
    loop {
        let bessel = scaled_bessel_i(len, x);
        let at = |order: i64| bessel[order.unsigned_abs() as usize];
        let diff = q2 as i64 - q as i64;
        let mut value = (0.5 * diff as f64 * ln_rho).exp() * at(diff)
            + (0.5 * (diff - 1) as f64 * ln_rho).exp() * at((q + q2 + 1) as i64);
        // Σ_{ℓ ≥ first} ρ^{q′ − ℓ/2} Î_ℓ, with I_{ℓ+1}/I_ℓ ≤ x/(2(ℓ+1))
        let mut tail = 0.0;
        let mut done = false;
        for l in first..=len {
            let term = ((q2 as f64 - 0.5 * l as f64) * ln_rho).exp() * bessel[l];
            tail += term;
            let ratio = x / (2.0 * (l + 1) as f64) / rho.sqrt();
            if ratio < 0.5 && (term == 0.0 || term * ratio / (1.0 - ratio) <= 1e-17 * tail.abs()) {
                done = true;
                break;
            }
        }
        if done {
            value += (1.0 - rho) * tail;
            return damp * value;
        }
        len *= 2;
    }
}
