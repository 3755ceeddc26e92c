use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Exact, Real};
use crate::types::{permutation_sign, permutations, RateVector, WeylPoint};

use super::intertwining::{chamber_box, pi_support, LambdaTable, PiTable};
use super::km::{check_dims, km_with};
use super::truncation::{dominated_box, Factor, TruncationBox};
use super::KernelValue;

/// Lattice points a pointwise sum may visit before giving up.
pub const MAX_LATTICE_POINTS: u64 = 50_000_000;

/// `P^ν_x(T > t) = Σ_{z ∈ W^N} P^ν_t(x, z)`, summed over a [`TruncationBox`]
/// whose Poisson tail bound is the reported error.
///
/// The determinant is expanded over permutations; for each permutation the
/// sum over the ordered box `z₀ ≥ … ≥ z_N` factorizes into a chain of
/// cumulative sums, so the cost is `O((N+1)!·(N+1)·width)`.
pub fn noncrossing_prob<R: Real>(
    x: &WeylPoint,
    t: &R,
    nu: &RateVector,
    tol: f64,
) -> Result<KernelValue<R>> {
    check_dims(nu, &[x])?;
    check_tol(tol)?;
    if nu.len() == 1 {
        return Ok(KernelValue::exact(R::one()));
    }
    let rates: Vec<R> = nu.scalars();
    let means: Vec<f64> = nu.rates().iter().map(|r| r * t.to_f64()).collect();
    let bx = TruncationBox::poisson(x.coords(), &means, tol)?;
    let value = chain_sum(x.coords(), &bx.upper, t, &rates);
    Ok(KernelValue {
        value,
        abs_error: bx.tail_bound,
    })
}

/// Same truncated sum as [`noncrossing_prob`], evaluated one Karlin–McGregor
/// determinant per lattice point.
pub fn noncrossing_prob_pointwise<R: Real>(
    x: &WeylPoint,
    t: &R,
    nu: &RateVector,
    tol: f64,
) -> Result<KernelValue<R>> {
    check_dims(nu, &[x])?;
    check_tol(tol)?;
    let rates: Vec<R> = nu.scalars();
    let means: Vec<f64> = nu.rates().iter().map(|r| r * t.to_f64()).collect();
    let bx = TruncationBox::poisson(x.coords(), &means, tol)?;
    check_points(x.coords(), &bx.upper, bx.tail_bound, tol)?;
    let mut value = R::zero();
    for z in chamber_box(x.coords(), &bx.upper) {
        value = value + km_with(x.coords(), &z, t, &rates);
    }
    Ok(KernelValue {
        value,
        abs_error: bx.tail_bound,
    })
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

pub(crate) fn check_points(lo: &[i64], hi: &[i64], achieved: f64, tol: f64) -> Result<()> {
    let count = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| (b - a + 1).max(0) as f64)
        .product::<f64>();
    if count > MAX_LATTICE_POINTS as f64 {
        return Err(Error::ToleranceUnachievable {
            requested: tol,
            achieved: achieved.max(tol),
        });
    }
    Ok(())
}

fn chain_sum<R: Real>(x: &[i64], upper: &[i64], t: &R, rates: &[R]) -> R {
    let n = rates.len();
    let floor = *x.iter().min().unwrap();
    // pois(m; ν_i t) for every degree the chain can reach
    let tables: Vec<Vec<R>> = (0..n)
        .map(|i| {
            let len = (upper[i] - floor + n as i64 + 1).max(1) as usize;
            R::poisson_table(&(rates[i].clone() * t.clone()), len)
        })
        .collect();
    let mass = |i: usize, deg: i64| -> R {
        if deg < 0 {
            R::zero()
        } else {
            tables[i][deg as usize].clone()
        }
    };
    let perms: Vec<Vec<usize>> = permutations(n).collect();
    let terms: Vec<R> = perms
        .par_iter()
        .map(|sigma| {
            // cumulative[v − x_{i+1}] = Σ_{x_{i+1} ≤ u ≤ v} G_{i+1}(u)
            let mut below: Option<(i64, Vec<R>)> = None;
            for i in (0..n).rev() {
                let j = sigma[i];
                let shift = -x[j] - i as i64 + j as i64;
                let lo = x[i];
                let hi = upper[i];
                let mut cumulative = Vec::with_capacity((hi - lo + 1).max(0) as usize);
                let mut running = R::zero();
                for v in lo..=hi {
                    let f = mass(i, v + shift);
                    let g = match &below {
                        None => f,
                        Some((blo, cum)) => {
                            let idx = v.min(blo + cum.len() as i64 - 1) - blo;
                            if idx < 0 || f.is_zero() {
                                R::zero()
                            } else {
                                f * cum[idx as usize].clone()
                            }
                        }
                    };
                    running = running + g;
                    cumulative.push(running.clone());
                }
                below = Some((lo, cumulative));
            }
            let (_, cum) = below.unwrap();
            let total = cum.last().cloned().unwrap_or_else(R::zero);
            let scale: R = (0..n)
                .filter(|&i| sigma[i] != i)
                .fold(R::one(), |acc, i| {
                    let j = sigma[i];
                    acc * (rates[i].clone() / rates[j].clone()).powi(x[j] - j as i64)
                });
            let signed = total * scale;
            if permutation_sign(sigma) < 0 {
                -signed
            } else {
                signed
            }
        })
        .collect();
    terms.into_iter().fold(R::zero(), |a, b| a + b)
}

/// `φ^ν_t(d, d′) = Σ_{z, z′} Π^ν(d, z) P^ν_t(z, z′) Λ^ν(z′, d′)`.
///
/// The `z` sum is finite. The `z′` sum is truncated using
/// `Λ^ν(z′, d′) ≤ ∏_{i<N} (u_i + z_i − z_N + N)^{N−i} ∏_k (ν_max/ν_k)^{u_k + z_k − z_N}`
/// with `u = z′ − z`, which bounds the GT-pattern count and weights, and
/// `P^ν_t(z, z′) ≤ ∏_k pois(u_k; ν_k t)`.
pub fn phi_via_intertwining<R: Real>(
    d: &WeylPoint,
    d2: &WeylPoint,
    t: &R,
    nu: &RateVector,
    tol: f64,
) -> Result<KernelValue<R>> {
    check_dims(nu, &[d, d2])?;
    check_tol(tol)?;
    let n = nu.len();
    let top = n - 1;
    let rates: Vec<R> = nu.scalars();
    let exact: Vec<Exact> = nu.scalars();
    let pi = PiTable::new(&exact);
    let starts: Vec<(WeylPoint, Exact)> = pi_support(d)
        .into_iter()
        .filter_map(|z| {
            let c = pi.eval(d.coords(), z.coords());
            (!num_traits::Zero::is_zero(&c)).then_some((z, c))
        })
        .collect();
    let weight: f64 = starts
        .iter()
        .map(|(_, c)| num_traits::ToPrimitive::to_f64(c).unwrap().abs())
        .sum();
    let nu_max = nu.max_rate();
    let mut value = R::zero();
    let mut error = 0.0;
    for (z, coeff) in &starts {
        let zc = z.coords();
        let pinned = d2[top] - zc[top];
        if pinned < 0 {
            continue;
        }
        let factors: Vec<Factor> = (0..n)
            .map(|k| {
                let lambda = nu.rate(k) * t.to_f64();
                if k == top {
                    Factor::Fixed {
                        g: crate::scalar::poisson_pmf(pinned as u64, lambda),
                    }
                } else {
                    Factor::Tilted {
                        lambda,
                        r: nu_max / nu.rate(k),
                        s: (zc[k] - zc[top]) as f64,
                        c: (zc[k] - zc[top] + top as i64) as f64,
                        p: (top - k) as f64,
                    }
                }
            })
            .collect();
        let (widths, bound) = dominated_box(&factors, tol / weight)?;
        let lo: Vec<i64> = (0..n).map(|k| zc[k].max(d2[k])).collect();
        let mut hi: Vec<i64> = (0..n).map(|k| zc[k] + widths[k]).collect();
        hi[top] = d2[top];
        check_points(&lo, &hi, bound, tol)?;
        let degree = (hi.iter().max().unwrap() - d2.coords().iter().min().unwrap() + n as i64).max(0);
        let lambda = LambdaTable::new(&rates, degree as usize);
        let mut inner = R::zero();
        for zp in chamber_box(&lo, &hi) {
            let l = lambda.eval(&zp, d2.coords());
            if l.is_zero() {
                continue;
            }
            inner = inner + km_with(zc, &zp, t, &rates) * l;
        }
        value = value + R::from_rational(coeff) * inner;
        error += num_traits::ToPrimitive::to_f64(coeff).unwrap().abs() * bound;
    }
    Ok(KernelValue {
        value,
        abs_error: error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::km::phi_direct;
    use crate::scalar::Hp;

    fn wp(v: &[i64]) -> WeylPoint {
        WeylPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_process_never_exits() {
        let nu = RateVector::parse("2").unwrap();
        let v = noncrossing_prob(&wp(&[0]), &5.0, &nu, 1e-12).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn vanishing_time() {
        let nu = RateVector::parse("1,2,3").unwrap();
        let v = noncrossing_prob(&wp(&[0, 0, 0]), &1e-9, &nu, 1e-12).unwrap();
        assert!((v.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn chain_matches_pointwise() {
        for (rates, x, t) in [
            ("1,2", vec![0, 0], 1.0),
            ("1,2,3", vec![0, 0, 0], 0.7),
            ("2,0.5,1.5", vec![2, 1, 1], 1.2),
            ("1,3,2,4", vec![1, 0, 0, 0], 0.4),
        ] {
            let nu = RateVector::parse(rates).unwrap();
            let a = noncrossing_prob(&wp(&x), &t, &nu, 1e-12).unwrap();
            let b = noncrossing_prob_pointwise(&wp(&x), &t, &nu, 1e-12).unwrap();
            assert!((a.value - b.value).abs() < 1e-12, "{rates}: {} vs {}", a.value, b.value);
            assert!(a.value > -1e-12 && a.value < 1.0 + 1e-12);
        }
    }

    #[test]
    fn high_precision_agrees() {
        let nu = RateVector::parse("1,2,3").unwrap();
        let a = noncrossing_prob(&wp(&[0, 0, 0]), &1.5, &nu, 1e-13).unwrap();
        let b = noncrossing_prob(&wp(&[0, 0, 0]), &Hp::from_f64(1.5), &nu, 1e-13).unwrap();
        assert!((a.value - b.value.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn intertwining_matches_direct() {
        let nu = RateVector::parse("1,2,3").unwrap();
        for (d, d2) in [
            ([0, 0, 0], [0, 0, 0]),
            ([0, 0, 0], [2, 1, 0]),
            ([1, 1, 0], [3, 2, 1]),
            ([2, 0, 0], [2, 1, 1]),
        ] {
            let direct: f64 = phi_direct(&wp(&d), &wp(&d2), &1.0, &nu).unwrap();
            let via = phi_via_intertwining(&wp(&d), &wp(&d2), &1.0, &nu, 1e-9).unwrap();
            assert!(
                (direct - via.value).abs() <= 1e-9 + 1e-10,
                "{d:?}->{d2:?}: {direct} vs {}",
                via.value
            );
        }
    }

    #[test]
    fn intertwining_respects_monotonicity() {
        let nu = RateVector::parse("1,2,3").unwrap();
        let via = phi_via_intertwining(&wp(&[2, 1, 0]), &wp(&[3, 0, 0]), &1.0, &nu, 1e-9).unwrap();
        assert!(via.value.abs() <= 1e-9 + 1e-10);
    }
}
