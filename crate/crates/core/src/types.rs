//! Domain types shared by every module: rate vectors, chamber points, queue
//! states and permutations.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default relative gap below which two rates count as coincident.
pub const EPS_DISTINCT: f64 = 1e-6;

/// Rates `(ν₀, …, ν_N)`: index 0 is the arrival rate, index `j ≥ 1` the
/// service rate of station `j`.
///
/// Values are held exactly (as parsed) and as doubles, so rational and float
/// computations start from the same numbers.
#[derive(Clone, PartialEq)]
pub struct RateVector {
    exact: Vec<BigRational>,
    float: Vec<f64>,
}

impl fmt::Debug for RateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RateVector{:?}", self.float)
    }
}

impl RateVector {
    pub fn from_exact(exact: Vec<BigRational>) -> Result<Self> {
        if exact.is_empty() {
            return Err(Error::InvalidRates("need at least the arrival rate".into()));
        }
        if let Some(bad) = exact.iter().find(|r| !r.is_positive()) {
            return Err(Error::InvalidRates(format!("rate {bad} is not strictly positive")));
        }
        let float = exact.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(RateVector { exact, float })
    }

    /// Rates from doubles; the exact copy is the binary value of each double.
    pub fn new(rates: &[f64]) -> Result<Self> {
        let exact = rates
            .iter()
            .map(|&r| {
                BigRational::from_float(r)
                    .ok_or_else(|| Error::InvalidRates(format!("rate {r} is not finite")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_exact(exact)
    }

    /// Parses a comma-separated list of decimal literals, e.g. `"1,2.5,4"`.
    pub fn parse(s: &str) -> Result<Self> {
        let exact = s
            .split(',')
            .map(|tok| parse_decimal(tok.trim()).map_err(Error::InvalidRates))
            .collect::<Result<Vec<_>>>()?;
        Self::from_exact(exact)
    }

    pub fn len(&self) -> usize {
        self.float.len()
    }

    pub fn is_empty(&self) -> bool {
        self.float.is_empty()
    }

    /// Number of service stations `N`.
    pub fn stations(&self) -> usize {
        self.float.len() - 1
    }

    pub fn rates(&self) -> &[f64] {
        &self.float
    }

    pub fn exact(&self) -> &[BigRational] {
        &self.exact
    }

    pub fn rate(&self, i: usize) -> f64 {
        self.float[i]
    }

    pub fn scalars<S: Scalar>(&self) -> Vec<S> {
        self.exact.iter().map(S::from_rational).collect()
    }

    pub fn max_rate(&self) -> f64 {
        self.float.iter().cloned().fold(f64::MIN, f64::max)
    }

    /// Loads `ρ_j = ν₀/ν_j` for `j = 1..=N`.
    pub fn loads(&self) -> Vec<f64> {
        self.float[1..].iter().map(|nu| self.float[0] / nu).collect()
    }

    pub fn max_load(&self) -> f64 {
        self.loads().into_iter().fold(0.0, f64::max)
    }

    /// `max_j ν₀/ν_j < 1`, decided exactly.
    pub fn is_stable(&self) -> bool {
        self.exact[1..].iter().all(|nu| &self.exact[0] < nu)
    }

    /// Every pair of rates differs by at least `eps` relative to the larger.
    pub fn is_distinct(&self, eps: f64) -> bool {
        min_relative_gap(&self.float) >= eps
    }

    /// Service rates `ν₁..ν_N` pairwise distinct.
    pub fn services_distinct(&self, eps: f64) -> bool {
        min_relative_gap(&self.float[1..]) >= eps
    }

    pub fn all_equal(&self) -> bool {
        self.exact.iter().all(|r| r == &self.exact[0])
    }

    pub fn require_stable(&self) -> Result<()> {
        if self.is_stable() {
            Ok(())
        } else {
            Err(Error::Unstable {
                max_load: self.max_load(),
            })
        }
    }

    pub fn require_distinct(&self, eps: f64) -> Result<()> {
        if self.is_distinct(eps) {
            Ok(())
        } else {
            Err(Error::NotDistinct {
                detail: format!(
                    "min relative gap {:.3e} < {eps:e} in {:?}",
                    min_relative_gap(&self.float),
                    self.float
                ),
            })
        }
    }

    /// `σ(ν)` with `σ(ν)_i = ν_{σ(i)}`.
    pub fn permuted(&self, perm: &[usize]) -> RateVector {
        RateVector {
            exact: perm.iter().map(|&p| self.exact[p].clone()).collect(),
            float: perm.iter().map(|&p| self.float[p]).collect(),
        }
    }

    /// All rates scaled by the same factor (used for time rescaling).
    pub fn scaled(&self, factor: &BigRational) -> RateVector {
        let exact: Vec<_> = self.exact.iter().map(|r| r * factor).collect();
        RateVector::from_exact(exact).expect("positive factor keeps rates positive")
    }
}

fn min_relative_gap(v: &[f64]) -> f64 {
    let mut gap = f64::INFINITY;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            let g = (v[a] - v[b]).abs() / v[a].max(v[b]);
            gap = gap.min(g);
        }
    }
    gap
}

/// Parses a decimal literal (`-1.25`, `3`, `2.5e-3`) into an exact rational.
pub fn parse_decimal(s: &str) -> std::result::Result<BigRational, String> {
    let err = || format!("not a decimal number: {s:?}");
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (
            &s[..pos],
            s[pos + 1..].parse::<i32>().map_err(|_| err())?,
        ),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| err())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// A lattice point of the Weyl chamber `W^N`: `z₀ ≥ z₁ ≥ … ≥ z_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylPoint(Vec<i64>);

impl WeylPoint {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotInChamber(coords));
        }
        Ok(WeylPoint(coords))
    }

    pub fn zero(len: usize) -> Self {
        WeylPoint(vec![0; len])
    }

    /// All coordinates equal to `level`.
    pub fn constant(len: usize, level: i64) -> Self {
        WeylPoint(vec![level; len])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    /// `π(x) = (x₀−x₁, …, x_{N−1}−x_N)`.
    pub fn gaps(&self) -> QueueState {
        QueueState(self.0.windows(2).map(|w| w[0] - w[1]).collect())
    }

    pub fn shifted(&self, by: i64) -> WeylPoint {
        WeylPoint(self.0.iter().map(|x| x + by).collect())
    }
}

impl std::ops::Index<usize> for WeylPoint {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

/// Queue lengths `(q₁, …, q_N)`, all nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QueueState(Vec<i64>);

impl QueueState {
    pub fn new(q: Vec<i64>) -> Result<Self> {
        if let Some(bad) = q.iter().find(|&&v| v < 0) {
            return Err(Error::InvalidArgument(format!(
                "queue length {bad} is negative"
            )));
        }
        Ok(QueueState(q))
    }

    pub fn zero(stations: usize) -> Self {
        QueueState(vec![0; stations])
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// `π̃_ℓ(q) = (ℓ+q₁+…+q_N, ℓ+q₂+…+q_N, …, ℓ+q_N, ℓ)`.
    pub fn lift(&self, level: i64) -> WeylPoint {
        let n = self.0.len();
        let mut out = vec![level; n + 1];
        for k in (0..n).rev() {
            out[k] = out[k + 1] + self.0[k];
        }
        WeylPoint(out)
    }
}

impl std::ops::Index<usize> for QueueState {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = Some((0..n).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut p = current.clone();
        if let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) {
            let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
            p.swap(i - 1, j);
            p[i..].reverse();
            next = Some(p);
        }
        Some(current)
    })
}

pub fn permutation_sign(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = p[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
pub(crate) fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("0.1").unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(parse_decimal("-2.50").unwrap(), BigRational::new((-5).into(), 2.into()));
        assert_eq!(parse_decimal("3e2").unwrap(), rational(300));
        assert_eq!(parse_decimal("1.5E-1").unwrap(), BigRational::new(3.into(), 20.into()));
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal(".").is_err());
    }

    #[test]
    fn rate_vector_predicates() {
        let nu = RateVector::parse("1,2,4").unwrap();
        assert!(nu.is_stable());
        assert!(nu.is_distinct(EPS_DISTINCT));
        assert_eq!(nu.loads(), vec![0.5, 0.25]);
        assert!(!RateVector::parse("2,1").unwrap().is_stable());
        assert!(!RateVector::parse("1,2,2").unwrap().is_distinct(EPS_DISTINCT));
        assert!(RateVector::parse("1,0,2").is_err());
        assert!(RateVector::parse("1,-3").is_err());
    }

    #[test]
    fn permutation_order_and_signs() {
        let all: Vec<_> = permutations(3).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[5], vec![2, 1, 0]);
        let signs: Vec<_> = all.iter().map(|p| permutation_sign(p)).collect();
        assert_eq!(signs, vec![1, -1, -1, 1, 1, -1]);
        assert_eq!(permutations(0).count(), 1);
    }

    #[test]
    fn lift_inverts_gaps() {
        let q = QueueState::new(vec![2, 0, 3]).unwrap();
        let z = q.lift(-1);
        assert_eq!(z.coords(), &[4, 2, 2, -1]);
        assert_eq!(z.gaps(), q);
        assert!(WeylPoint::new(vec![0, 1]).is_err());
    }
}
