//! Queue-length transition probabilities `k^ν_t(q, q′)` of the series
//! network: the permutation sums for `k_t(0,0)`, the general intertwining
//! representation, the equal-rates product form and the M/M/1 Bessel form.

mod general;
mod mm1;

pub use general::{kt_equal_rates_to_empty, kt_general};
pub use mm1::{mm1_kt, scaled_bessel_i};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kernels::{noncrossing_prob, KernelValue};
use crate::linalg::det_in_place;
use crate::scalar::{Exact, Real, Scalar};
use crate::types::{permutations, RateVector, WeylPoint, EPS_DISTINCT};

/// One term `coefficient · P^{σ(ν)}_0(T > t)` of a permutation sum.
#[derive(Clone, Debug, PartialEq)]
pub struct PermutationTerm {
    pub sigma: Vec<usize>,
    pub coefficient: Exact,
    /// `σ(ν)`, with `σ(ν)_i = ν_{σ(i)}`.
    pub rates: RateVector,
}

/// `π₀ = ∏_{j=1}^N (1 − ν₀/ν_j)`, the stationary probability of an empty
/// network.
pub fn stationary_empty_prob<S: Scalar>(nu: &RateVector) -> Result<S> {
    nu.require_stable()?;
    Ok(S::from_rational(&stationary_exact(nu)))
}

fn stationary_exact(nu: &RateVector) -> Exact {
    let r = nu.exact();
    r[1..]
        .iter()
        .fold(<Exact as Scalar>::one(), |acc, v| acc * (<Exact as Scalar>::one() - &r[0] / v))
}

/// `∏_{0≤i<j<len} (1 − ν_{σ(j)}/ν_{σ(i)})` in exact arithmetic.
fn pair_product(nu: &RateVector, sigma: &[usize], len: usize) -> Exact {
    let r = nu.exact();
    let one = <Exact as Scalar>::one();
    let mut acc = one.clone();
    for i in 0..len {
        for j in i + 1..len {
            acc *= one.clone() - &r[sigma[j]] / &r[sigma[i]];
        }
    }
    acc
}

fn require_times<R: Real>(t: &R) -> Result<()> {
    if !(t.to_f64() > 0.0) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {}", t.to_f64())));
    }
    Ok(())
}

/// The `N!` terms `σ(N) = 0` with coefficients `1/∏_{0≤i<j<N}(1 − ν_{σ(j)}/ν_{σ(i)})`.
pub fn terms_sum31(nu: &RateVector) -> Result<Vec<PermutationTerm>> {
    let n = nu.stations();
    if !RateVector::services_distinct(nu, EPS_DISTINCT) {
        return Err(Error::NotDistinct {
            detail: format!(
                "service rates {:?} coincide; use kt_general or the uniformization oracle",
                &nu.rates()[1..]
            ),
        });
    }
    Ok(permutations(n + 1)
        .filter(|s| s[n] == 0)
        .map(|sigma| {
            let coefficient = pair_product(nu, &sigma, n).recip();
            PermutationTerm {
                rates: nu.permuted(&sigma),
                sigma,
                coefficient,
            }
        })
        .collect())
}

/// The `(N+1)! − N!` terms `σ(N) ≠ 0` with coefficients
/// `−π₀/∏_{0≤i<j≤N}(1 − ν_{σ(j)}/ν_{σ(i)})`.
pub fn terms_sum32(nu: &RateVector) -> Result<Vec<PermutationTerm>> {
    nu.require_stable()?;
    nu.require_distinct(EPS_DISTINCT).map_err(|e| match e {
        Error::NotDistinct { detail } => Error::NotDistinct {
            detail: format!("{detail}; use kt_general or the uniformization oracle"),
        },
        other => other,
    })?;
    let n = nu.stations();
    let pi0 = stationary_exact(nu);
    Ok(permutations(n + 1)
        .filter(|s| s[n] != 0)
        .map(|sigma| {
            let coefficient = -(pi0.clone() / pair_product(nu, &sigma, n + 1));
            PermutationTerm {
                rates: nu.permuted(&sigma),
                sigma,
                coefficient,
            }
        })
        .collect())
}

/// `Σ c_σ P^{σ(ν)}_0(T > t)` with each probability evaluated to
/// `tol / Σ|c_σ|`.
fn weighted_sum<R: Real>(terms: &[PermutationTerm], t: &R, tol: f64) -> Result<KernelValue<R>> {
    let weight: f64 = terms
        .iter()
        .map(|term| term.coefficient.abs().to_f64().unwrap_or(f64::INFINITY))
        .sum();
    let per_term = if weight > 0.0 { tol / weight } else { tol };
    let mut value = R::zero();
    let mut abs_error = 0.0;
    for term in terms {
        let origin = WeylPoint::zero(term.rates.len());
        let p = noncrossing_prob(&origin, t, &term.rates, per_term)?;
        value = value + R::from_rational(&term.coefficient) * p.value;
        abs_error += term.coefficient.abs().to_f64().unwrap_or(f64::INFINITY) * p.abs_error;
    }
    Ok(KernelValue { value, abs_error })
}

/// `k^ν_t(0,0) = Σ_{σ(N)=0} P^{σ(ν)}(T>t) / ∏_{0≤i<j<N}(1 − ν_{σ(j)}/ν_{σ(i)})`
/// for distinct service rates.
pub fn kt00_sum31<R: Real>(t: &R, nu: &RateVector, tol: f64) -> Result<KernelValue<R>> {
    require_times(t)?;
    weighted_sum(&terms_sum31(nu)?, t, tol)
}

/// `k^ν_t(0,0) = π₀ − Σ_{σ(N)≠0} π₀ P^{σ(ν)}(T>t) / ∏_{0≤i<j≤N}(1 − ν_{σ(j)}/ν_{σ(i)})`
/// for a stable network with distinct rates.
pub fn kt00_sum32<R: Real>(t: &R, nu: &RateVector, tol: f64) -> Result<KernelValue<R>> {
    let excess = kt00_excess32(t, nu, tol)?;
    Ok(KernelValue {
        value: stationary_empty_prob::<R>(nu)? + excess.value,
        abs_error: excess.abs_error,
    })
}

/// `k^ν_t(0,0) − π₀` from the same sum as [`kt00_sum32`], without adding
/// `π₀` back, so small deviations keep their relative precision.
pub fn kt00_excess32<R: Real>(t: &R, nu: &RateVector, tol: f64) -> Result<KernelValue<R>> {
    require_times(t)?;
    weighted_sum(&terms_sum32(nu)?, t, tol)
}

/// `ω_λ(x) = λ₀^{−x₀}⋯λ_N^{−x_N} det{λ_j^{x_i−i+j}}`.
pub fn omega<S: Scalar>(lambda: &RateVector, x: &WeylPoint) -> Result<S> {
    if x.len() != lambda.len() {
        return Err(Error::Dimension {
            expected: lambda.len(),
            got: x.len(),
        });
    }
    lambda.require_distinct(EPS_DISTINCT)?;
    let rates: Vec<S> = lambda.scalars();
    let n = rates.len();
    let mut m = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            m.push(rates[j].powi(x[i] - i as i64 + j as i64));
        }
    }
    let scale = (0..n).fold(S::one(), |acc, k| acc * rates[k].powi(-x[k]));
    Ok(det_in_place(n, m) * scale)
}

/// `ω_λ(x)` together with `ω_λ = ω_λ(0) = ∏_{i<j}(1 − λ_j/λ_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaWeight<S> {
    pub value: S,
    pub at_origin: S,
}

impl<S: Scalar> OmegaWeight<S> {
    pub fn new(lambda: &RateVector, x: &WeylPoint) -> Result<Self> {
        let value = omega(lambda, x)?;
        let identity: Vec<usize> = (0..lambda.len()).collect();
        let at_origin = S::from_rational(&pair_product(lambda, &identity, lambda.len()));
        Ok(OmegaWeight { value, at_origin })
    }
}

pub(crate) fn nonzero(r: &Exact) -> bool {
    !Zero::is_zero(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::{schur, SchurMethod};

    fn rates(s: &str) -> RateVector {
        RateVector::parse(s).unwrap()
    }

    #[test]
    fn stationary_examples() {
        assert_eq!(stationary_empty_prob::<f64>(&rates("1,2,4")).unwrap(), 0.375);
        assert_eq!(stationary_empty_prob::<f64>(&rates("1,2")).unwrap(), 0.5);
        let v: f64 = stationary_empty_prob(&rates("1,1000000")).unwrap();
        assert!((v - 0.999999).abs() < 1e-15);
        assert!(matches!(
            stationary_empty_prob::<f64>(&rates("2,1")),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn term_counts() {
        let nu = rates("1,2,3,5");
        assert_eq!(terms_sum31(&nu).unwrap().len(), 6);
        assert_eq!(terms_sum32(&nu).unwrap().len(), 24 - 6);
        assert!(terms_sum31(&rates("1,2,2")).is_err());
        assert!(terms_sum32(&rates("2,3,4")).is_ok());
        assert!(terms_sum32(&rates("3,3,4")).is_err());
    }

    #[test]
    fn mm1_as_single_term() {
        // N=1: k_t(0,0) = P^{(ν₁,ν₀)}(T>t)
        let nu = rates("1,2");
        let a = kt00_sum31(&1.0, &nu, 1e-12).unwrap();
        assert!((a.value - mm1_kt(0, 0, 1.0, 1.0, 2.0)).abs() < 1e-11);
        let b = kt00_sum32(&2.0, &nu, 1e-12).unwrap();
        assert!((b.value - mm1_kt(0, 0, 2.0, 1.0, 2.0)).abs() < 1e-11);
    }

    #[test]
    fn theorems_agree() {
        for s in ["1,2,3", "1,3,2", "0.5,4,1.5", "1,2,3,5"] {
            let nu = rates(s);
            let a = kt00_sum31(&1.0, &nu, 1e-11).unwrap();
            let b = kt00_sum32(&1.0, &nu, 1e-11).unwrap();
            assert!((a.value - b.value).abs() < 2e-10, "{s}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn symmetric_in_service_rates() {
        let a = kt00_sum31(&1.0, &rates("1,2,3"), 1e-12).unwrap();
        let b = kt00_sum31(&1.0, &rates("1,3,2"), 1e-12).unwrap();
        assert!((a.value - b.value).abs() < 1e-11);
    }

    #[test]
    fn limits() {
        let nu = rates("1,2,4");
        let small = kt00_sum31(&1e-6, &nu, 1e-12).unwrap();
        assert!((small.value - 1.0).abs() < 1e-5);
        let large = kt00_sum32(&200.0, &nu, 1e-12).unwrap();
        assert!((large.value - 0.375).abs() < 1e-9, "{large:?}");
        assert!(kt00_sum31(&0.0, &nu, 1e-12).is_err());
    }

    #[test]
    fn omega_at_origin() {
        let lam = rates("5,2,1.5,1");
        let w = OmegaWeight::<Exact>::new(&lam, &WeylPoint::zero(4)).unwrap();
        assert_eq!(w.value, w.at_origin);
        assert!(omega::<f64>(&rates("1,1"), &WeylPoint::zero(2)).is_err());
    }

    #[test]
    fn omega_two_by_two() {
        // det [[λ₀, λ₁²], [1/λ₀, 1]] / λ₀ = 1 − λ₁²/λ₀² at λ=(2,1), x=(1,0)
        let lam = rates("2,1");
        let x = WeylPoint::new(vec![1, 0]).unwrap();
        let v: Exact = omega(&lam, &x).unwrap();
        assert_eq!(v, Exact::new(3.into(), 4.into()));
    }

    #[test]
    fn omega_matches_schur_form() {
        // ω_λ(x) = ω_λ · λ^{−x} s_x(λ)
        let lam = rates("5,2,1.5,1");
        let exact: Vec<Exact> = lam.scalars();
        for x in [[0, 0, 0, 0], [2, 1, 0, 0], [3, 3, 1, 0], [4, 2, 2, 1]] {
            let x = WeylPoint::new(x.to_vec()).unwrap();
            let w = OmegaWeight::<Exact>::new(&lam, &x).unwrap();
            let s: Exact = schur(&x, &exact, SchurMethod::GtSum).unwrap();
            let mono = (0..4).fold(<Exact as Scalar>::one(), |acc, k| acc * exact[k].powi(-x[k]));
            assert_eq!(w.value, w.at_origin * mono * s, "{x:?}");
        }
    }
}
