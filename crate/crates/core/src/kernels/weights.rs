use crate::error::Result;
use crate::scalar::{ln_factorial, Real};
use crate::symfunc::{complete_homogeneous_table, elementary_table};
use crate::types::RateVector;

/// `w_n(t) = tⁿ/n!` for `t ≥ 0`, `n ≥ 0`; zero otherwise.
pub fn w<R: Real>(n: i64, t: &R) -> R {
    if n < 0 || *t < R::zero() {
        return R::zero();
    }
    R::pow_over_factorial(t, n as u64)
}

/// `w^{(ij)}_n(t)`: a finite alternating sum for `j ≤ i` and a convergent
/// series in `h^{(ij)}_k(ν)` for `i < j`.
pub fn w_ij<R: Real>(n: i64, t: &R, nu: &RateVector, i: usize, j: usize) -> Result<R> {
    check_index(nu, i)?;
    check_index(nu, j)?;
    if *t < R::zero() {
        return Ok(R::zero());
    }
    let rates: Vec<R> = nu.scalars();
    Ok(mixed_sum(n, i, j, &rates, t, |m| w(m, t)))
}

fn check_index(nu: &RateVector, i: usize) -> Result<()> {
    if i >= nu.len() {
        return Err(crate::Error::Dimension {
            expected: i + 1,
            got: nu.len(),
        });
    }
    Ok(())
}

/// `Σ_k c_k f(n+k)` where `c_k = (−1)^k e_k(β_{j+1..i})` for `j ≤ i` and
/// `c_k = h_k(β_{i+1..j})` for `i < j`. `f` must satisfy
/// `f(m+1)/f(m) = λ/(m+1)` for `m ≥ 0` and vanish for `m < 0` (Poisson masses
/// and `w_m` both do).
pub(crate) fn mixed_sum<R: Real>(
    n: i64,
    i: usize,
    j: usize,
    beta: &[R],
    lambda: &R,
    f: impl Fn(i64) -> R,
) -> R {
    if j <= i {
        let e = elementary_table(&beta[j + 1..=i]);
        let mut acc = R::zero();
        for (k, ek) in e.into_iter().enumerate() {
            let term = ek * f(n + k as i64);
            acc = if k % 2 == 0 { acc + term } else { acc - term };
        }
        return acc;
    }
    h_series(n, &beta[i + 1..=j], lambda, f)
}

/// `Σ_{k≥0} h_k(β) f(n+k)` with all terms nonnegative, cut off once a
/// rigorous geometric bound on the remainder drops below `R::EPSILON` of
/// the partial sum (and at least 8 nonzero terms are in).
fn h_series<R: Real>(n: i64, beta: &[R], lambda: &R, f: impl Fn(i64) -> R) -> R {
    let m = beta.len() as f64;
    let a = beta.iter().map(|b| b.to_f64()).fold(0.0, f64::max);
    let lam = lambda.to_f64();
    if lam == 0.0 {
        // only f(0) survives
        return if n <= 0 {
            complete_homogeneous_table((-n) as usize, beta).pop().unwrap() * f(0)
        } else {
            f(n)
        };
    }
    let k0 = (-n).max(0) as usize;
    let mut cap = (k0 + 32).next_power_of_two();
    let mut h = complete_homogeneous_table(cap, beta);
    let mut term = f(n + k0 as i64);
    let mut acc = R::zero();
    let mut k = k0;
    loop {
        if k > cap {
            cap *= 2;
            h = complete_homogeneous_table(cap, beta);
        }
        acc = acc + h[k].clone() * term.clone();
        if term.is_zero() || a == 0.0 {
            return acc;
        }
        // bound on h_k f(n+k): C(k+m−1, m−1) a^k f(n+k)
        let next = k + 1;
        let deg = (n + next as i64) as f64;
        let ratio = a * lam * (next as f64 + m - 1.0) / (next as f64 * deg);
        if next - k0 >= 8 && ratio < 0.5 {
            let ln_next = ln_binom(next as f64 + m - 1.0, m - 1.0)
                + next as f64 * a.ln()
                + term.ln().to_f64()
                + (lam / deg).ln();
            let ln_tail = ln_next - (1.0 - ratio).ln();
            let ln_acc = acc.ln().to_f64();
            if ln_tail < R::EPSILON.ln() + ln_acc {
                return acc;
            }
        }
        term = term * lambda.clone() / R::from_i64(n + next as i64);
        k = next;
    }
}

fn ln_binom(n: f64, k: f64) -> f64 {
    ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial((n - k) as u64)
}
