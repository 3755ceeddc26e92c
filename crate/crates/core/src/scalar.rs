//! Scalar abstraction shared by the exact, double and high-precision paths.
//!
//! Everything combinatorial (symmetric functions, the Λ/Π kernels) is written
//! against [`Scalar`], so the same code runs over exact rationals for identity
//! checks and over floats for numerics. Anything that needs `exp`/`ln`
//! (Poisson weights, Bessel functions) is written against [`Real`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_base::{Abs, SquareRoot};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational scalar used for identity verification.
pub type Exact = BigRational;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn is_zero(&self) -> bool;

    /// Whether `self` is a strictly better elimination pivot than `other`.
    fn better_pivot(&self, other: &Self) -> bool;

    fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return Self::one() / self.powi(-n);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

pub trait Real: Scalar + PartialOrd {
    /// Unit roundoff of the representation.
    const EPSILON: f64;

    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;

    /// `t^n / n!` for `n >= 0`, `t >= 0`.
    fn pow_over_factorial(t: &Self, n: u64) -> Self;

    /// Poisson(λ) point mass at `m` (zero for `m < 0`).
    fn poisson(m: i64, lambda: &Self) -> Self {
        if m < 0 {
            return Self::zero();
        }
        Self::pow_over_factorial(lambda, m as u64) * (-lambda.clone()).exp()
    }

    /// Poisson(λ) point masses for `0..len`.
    fn poisson_table(lambda: &Self, len: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return out;
        }
        let mut p = (-lambda.clone()).exp();
        out.push(p.clone());
        for m in 1..len {
            p = p * lambda.clone() / Self::from_i64(m as i64);
            out.push(p.clone());
        }
        out
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

// ---------------------------------------------------------------- f64

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn better_pivot(&self, other: &Self) -> bool {
        f64::abs(*self) > f64::abs(*other)
    }
    fn powi(&self, n: i64) -> Self {
        if let Ok(n) = i32::try_from(n) {
            f64::powi(*self, n)
        } else {
            f64::powf(*self, n as f64)
        }
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn pow_over_factorial(t: &Self, n: u64) -> Self {
        if n == 0 {
            return 1.0;
        }
        if *t == 0.0 {
            return 0.0;
        }
        (n as f64 * t.ln() - ln_factorial(n)).exp()
    }
    fn poisson(m: i64, lambda: &Self) -> Self {
        if m < 0 {
            0.0
        } else {
            poisson_pmf(m as u64, *lambda)
        }
    }
    fn poisson_table(lambda: &Self, len: usize) -> Vec<Self> {
        // log-domain per entry: e^{-λ} underflows long before the mass does
        (0..len).map(|m| poisson_pmf(m as u64, *lambda)).collect()
    }
}

/// `ln n!` in double precision.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// Poisson(λ) point mass at `m`, evaluated in the log domain.
pub fn poisson_pmf(m: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    (m as f64 * lambda.ln() - lambda - ln_factorial(m)).exp()
}

// ---------------------------------------------------------------- exact

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as num_traits::One>::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn better_pivot(&self, other: &Self) -> bool {
        // any nonzero pivot is exact; prefer small entries to keep sizes down
        !Zero::is_zero(self) && (Zero::is_zero(other) || self.abs() < other.abs())
    }
}

// ---------------------------------------------------------------- high precision

/// Working precision of [`Hp`] in bits (just under 58 decimal digits).
pub const HP_BITS: usize = 192;

type Big = FBig<HalfEven, 2>;

/// Binary floating point with [`HP_BITS`] bits of mantissa and an unbounded
/// exponent, for large-`t` evaluations where doubles lose the signal.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Hp(Big);

impl Hp {
    fn wrap(v: Big) -> Self {
        Hp(v.with_precision(HP_BITS).value())
    }

    fn from_bigint(n: &BigInt) -> Self {
        let digits = n.to_str_radix(16);
        let int = IBig::from_str_radix(&digits, 16).expect("hex digits from BigInt");
        Hp::wrap(Big::from(int))
    }
}

impl fmt::Debug for Hp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hp({:e})", self.0.to_f64().value())
    }
}

impl fmt::Display for Hp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dec = self.0.clone().with_base::<10>().value();
        write!(f, "{}", dec.with_precision(58).value())
    }
}

impl FromStr for Hp {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let r = crate::types::parse_decimal(s)?;
        Ok(Hp::from_rational(&r))
    }
}

impl Add for Hp {
    type Output = Hp;
    fn add(self, rhs: Hp) -> Hp {
        Hp(self.0 + rhs.0)
    }
}
impl Sub for Hp {
    type Output = Hp;
    fn sub(self, rhs: Hp) -> Hp {
        Hp(self.0 - rhs.0)
    }
}
impl Mul for Hp {
    type Output = Hp;
    fn mul(self, rhs: Hp) -> Hp {
        Hp(self.0 * rhs.0)
    }
}
impl Div for Hp {
    type Output = Hp;
    fn div(self, rhs: Hp) -> Hp {
        Hp(self.0 / rhs.0)
    }
}
impl Neg for Hp {
    type Output = Hp;
    fn neg(self) -> Hp {
        Hp(-self.0)
    }
}

impl Scalar for Hp {
    fn zero() -> Self {
        Hp::wrap(Big::ZERO)
    }
    fn one() -> Self {
        Hp::wrap(Big::ONE)
    }
    fn from_i64(v: i64) -> Self {
        Hp::wrap(Big::from(v))
    }
    fn from_rational(r: &BigRational) -> Self {
        Hp::from_bigint(r.numer()) / Hp::from_bigint(r.denom())
    }
    fn is_zero(&self) -> bool {
        self.0 == Big::ZERO
    }
    fn better_pivot(&self, other: &Self) -> bool {
        self.0.abs_cmp(&other.0) == Ordering::Greater
    }
}

use dashu_base::AbsOrd;

impl Real for Hp {
    const EPSILON: f64 = 1.0 / (1u128 << 96) as f64 / (1u128 << 96) as f64;

    fn from_f64(v: f64) -> Self {
        Hp::wrap(Big::try_from(v).expect("finite f64"))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn exp(&self) -> Self {
        Hp(self.0.exp())
    }
    fn ln(&self) -> Self {
        Hp(self.0.ln())
    }
    fn sqrt(&self) -> Self {
        Hp(SquareRoot::sqrt(&self.0))
    }
    fn abs(&self) -> Self {
        Hp(self.0.clone().abs())
    }
    fn pow_over_factorial(t: &Self, n: u64) -> Self {
        let mut acc = Hp::one();
        for k in 1..=n {
            acc = acc * t.clone() / Hp::from_i64(k as i64);
        }
        acc
    }
}
