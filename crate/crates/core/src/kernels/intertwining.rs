use crate::error::{Error, Result};
use crate::linalg::det_in_place;
use crate::scalar::Scalar;
use crate::symfunc::{complete_homogeneous_table, elementary_table, enumerate_gt, gt_weight};
use crate::types::{QueueState, RateVector, WeylPoint};

use super::km::check_dims;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMethod {
    Determinant,
    GtSum,
}

/// `Λ^ν(z, d) = ν^{d−z} det{h^{(jN)}_{z_i−d_j−i+j}}`, or equivalently
/// `ν^{−z} Σ ν^x` over GT patterns with shape `z` and left edge `d`.
pub fn lambda_kernel<S: Scalar>(
    z: &WeylPoint,
    d: &WeylPoint,
    nu: &RateVector,
    method: LambdaMethod,
) -> Result<S> {
    check_dims(nu, &[z, d])?;
    let rates: Vec<S> = nu.scalars();
    match method {
        LambdaMethod::Determinant => {
            let degree = max_degree(z.coords(), d.coords());
            Ok(LambdaTable::new(&rates, degree).eval(z.coords(), d.coords()))
        }
        LambdaMethod::GtSum => {
            let mut sum = S::zero();
            for x in enumerate_gt(z, Some(d.coords())) {
                sum = sum + gt_weight(&x, &rates)?;
            }
            Ok(sum * monomial(&rates, z.coords(), -1))
        }
    }
}

fn max_degree(z: &[i64], d: &[i64]) -> usize {
    let n = z.len() as i64;
    let top = z.iter().max().unwrap_or(&0) - d.iter().min().unwrap_or(&0) + n;
    top.max(0) as usize
}

/// `∏ ν_k^{sign·z_k}`.
fn monomial<S: Scalar>(rates: &[S], z: &[i64], sign: i64) -> S {
    rates
        .iter()
        .zip(z)
        .fold(S::one(), |acc, (r, &e)| acc * r.powi(sign * e))
}

/// Precomputed `h^{(jN)}_r` for `r ≤ degree`, for evaluating `Λ^ν` at many
/// points.
#[derive(Clone, Debug)]
pub struct LambdaTable<S> {
    rates: Vec<S>,
    h: Vec<Vec<S>>,
}

impl<S: Scalar> LambdaTable<S> {
    pub fn new(rates: &[S], degree: usize) -> Self {
        let h = (0..rates.len())
            .map(|j| complete_homogeneous_table(degree, &rates[j + 1..]))
            .collect();
        LambdaTable {
            rates: rates.to_vec(),
            h,
        }
    }

    fn h(&self, j: usize, r: i64) -> S {
        if r < 0 {
            return S::zero();
        }
        match self.h[j].get(r as usize) {
            Some(v) => v.clone(),
            None => complete_homogeneous_table(r as usize, &self.rates[j + 1..])
                .pop()
                .unwrap(),
        }
    }

    /// `Λ^ν(z, d)`, with row `i` carrying `ν_i^{−z_i}` and column `j`
    /// carrying `ν_j^{d_j}`.
    pub fn eval(&self, z: &[i64], d: &[i64]) -> S {
        let n = self.rates.len();
        if z[n - 1] != d[n - 1] || z.iter().zip(d).any(|(a, b)| a < b) {
            return S::zero();
        }
        let row: Vec<S> = (0..n).map(|i| self.rates[i].powi(-z[i])).collect();
        let col: Vec<S> = (0..n).map(|j| self.rates[j].powi(d[j])).collect();
        let mut m = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let h = self.h(j, z[i] - d[j] - i as i64 + j as i64);
                if h.is_zero() {
                    m.push(h);
                } else {
                    m.push(h * row[i].clone() * col[j].clone());
                }
            }
        }
        det_in_place(n, m)
    }
}

/// `Π^ν(d, z) = ν^{z−d} det{(−1)^{d_i−z_j−i+j} e^{(iN)}_{d_i−z_j−i+j}}`.
pub fn pi_kernel<S: Scalar>(d: &WeylPoint, z: &WeylPoint, nu: &RateVector) -> Result<S> {
    check_dims(nu, &[d, z])?;
    let rates: Vec<S> = nu.scalars();
    Ok(PiTable::new(&rates).eval(d.coords(), z.coords()))
}

/// Precomputed `e^{(iN)}_r` (all nonzero degrees) for evaluating `Π^ν`.
#[derive(Clone, Debug)]
pub struct PiTable<S> {
    rates: Vec<S>,
    e: Vec<Vec<S>>,
}

impl<S: Scalar> PiTable<S> {
    pub fn new(rates: &[S]) -> Self {
        let e = (0..rates.len())
            .map(|i| elementary_table(&rates[i + 1..]))
            .collect();
        PiTable {
            rates: rates.to_vec(),
            e,
        }
    }

    pub fn eval(&self, d: &[i64], z: &[i64]) -> S {
        let n = self.rates.len();
        let row: Vec<S> = (0..n).map(|i| self.rates[i].powi(-d[i])).collect();
        let col: Vec<S> = (0..n).map(|j| self.rates[j].powi(z[j])).collect();
        let mut m = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let r = d[i] - z[j] - i as i64 + j as i64;
                let e = if r < 0 {
                    None
                } else {
                    self.e[i].get(r as usize)
                };
                match e {
                    Some(e) => {
                        let v = e.clone() * row[i].clone() * col[j].clone();
                        m.push(if r % 2 == 0 { v } else { -v });
                    }
                    None => m.push(S::zero()),
                }
            }
        }
        det_in_place(n, m)
    }
}

/// `Λ^ν_Q(z, q) = Λ^ν(z, π̃_{z_N}(q))`, the only nonzero term of
/// `Σ_ℓ Λ^ν(z, π̃_ℓ(q))`.
pub fn lambda_q<S: Scalar>(z: &WeylPoint, q: &QueueState, nu: &RateVector) -> Result<S> {
    check_queue(nu, q)?;
    let d = q.lift(z[z.len() - 1]);
    lambda_kernel(z, &d, nu, LambdaMethod::Determinant)
}

/// `Π^ν_Q(q, z) = Π^ν(π̃(q), z)`.
pub fn pi_q<S: Scalar>(q: &QueueState, z: &WeylPoint, nu: &RateVector) -> Result<S> {
    check_queue(nu, q)?;
    pi_kernel(&q.lift(0), z, nu)
}

fn check_queue(nu: &RateVector, q: &QueueState) -> Result<()> {
    if q.len() != nu.stations() {
        return Err(Error::Dimension {
            expected: nu.stations(),
            got: q.len(),
        });
    }
    Ok(())
}

/// Chamber points `z` with `Π^ν(d, z)` possibly nonzero: a permutation term
/// survives only if `0 ≤ d_i − z_{σ(i)} − i + σ(i) ≤ N − i` for every `i`,
/// which confines `z_j` to `[d_N − N + j, d_0 + j]`.
pub fn pi_support(d: &WeylPoint) -> Vec<WeylPoint> {
    let n = d.len();
    if n == 0 {
        return vec![WeylPoint::zero(0)];
    }
    let top = n as i64 - 1;
    let lo: Vec<i64> = (0..n).map(|j| d[n - 1] - top + j as i64).collect();
    let hi: Vec<i64> = (0..n).map(|j| d[0] + j as i64).collect();
    chamber_box(&lo, &hi)
        .map(|z| WeylPoint::new(z).expect("chamber_box yields chamber points"))
        .collect()
}

/// Finite set containing the support of `z ↦ Π^ν_Q(q, z)`.
pub fn pi_q_support(q: &QueueState) -> Vec<WeylPoint> {
    pi_support(&q.lift(0))
}

/// Nonincreasing integer vectors with `lo ≤ z ≤ hi` coordinatewise, in
/// lexicographic order.
pub fn chamber_box(lo: &[i64], hi: &[i64]) -> impl Iterator<Item = Vec<i64>> {
    let n = lo.len();
    // z_k ≥ lo_m for every m ≥ k
    let mut lo = lo.to_vec();
    for k in (0..n.saturating_sub(1)).rev() {
        lo[k] = lo[k].max(lo[k + 1]);
    }
    let hi = hi.to_vec();
    // z_k ranges over [lo_k, min(hi_k, z_{k−1})]
    let bound = move |z: &[i64], k: usize, hi: &[i64]| {
        if k == 0 {
            hi[0]
        } else {
            hi[k].min(z[k - 1])
        }
    };
    let mut current: Option<Vec<i64>> = None;
    let mut started = false;
    std::iter::from_fn(move || {
        if !started {
            started = true;
            let mut z = vec![0; n];
            if fill(&mut z, 0, &lo, &hi, &bound) {
                current = Some(z);
            }
            return current.clone();
        }
        let z = current.as_mut()?;
        for k in (0..n).rev() {
            if z[k] < bound(z, k, &hi) {
                z[k] += 1;
                if fill(z, k + 1, &lo, &hi, &bound) {
                    return Some(z.clone());
                }
            }
        }
        current = None;
        None
    })
}

/// Sets `z[from..]` to the smallest admissible values; false if some
/// coordinate has an empty range.
fn fill(
    z: &mut [i64],
    from: usize,
    lo: &[i64],
    hi: &[i64],
    bound: &impl Fn(&[i64], usize, &[i64]) -> i64,
) -> bool {
    for k in from..z.len() {
        z[k] = lo[k];
        if z[k] > bound(z, k, hi) {
            return false;
        }
    }
    true
}
