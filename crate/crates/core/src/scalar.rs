//! Scalar abstraction shared by the classical machinery.
//!
//! Strategies, the simplex solver and the support optimizers are written
//! against [`Scalar`] so the same code runs on exact rationals (the default,
//! see [`crate::Rational`]) and on `f32`/`f64` when an approximate answer is
//! enough. Exact types report a zero tolerance, so every comparison made
//! through [`Scalar::is_positive`] and friends is exact for them.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Absolute tolerance used for sign and equality decisions.
    fn tolerance() -> Self;

    fn is_exact() -> bool;

    fn to_f64(&self) -> f64;

    fn from_fraction(num: i64, den: i64) -> Self;

    fn is_positive_tol(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_negative_tol(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn is_zero_tol(&self) -> bool {
        !self.is_positive_tol() && !self.is_negative_tol()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero_tol()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        Self::zero()
    }

    fn is_exact() -> bool {
        true
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Scalar for Ratio<i64> {
    fn tolerance() -> Self {
        Self::zero()
    }

    fn is_exact() -> bool {
        true
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-12
    }

    fn is_exact() -> bool {
        false
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-6
    }

    fn is_exact() -> bool {
        false
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }
}

/// Exact fraction `num/den` as a [`crate::Rational`].
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::from_fraction(num, den)
}

/// Formats a rational as `num/den`, or just `num` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str_radix(n.trim(), 10).ok()?;
            let d = BigInt::from_str_radix(d.trim(), 10).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Ratio::new(n, d))
        }
        None => Some(Ratio::from_integer(BigInt::from_str_radix(s, 10).ok()?)),
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Best rational approximation with denominator at most `max_den`
/// (Stern–Brocot walk). Used to read float results back as fractions.
pub fn nearest_fraction(x: f64, max_den: i64) -> BigRational {
    let neg = x < 0.0;
    let x = x.abs();
    let (mut lo_n, mut lo_d, mut hi_n, mut hi_d) = (0i64, 1i64, 1i64, 0i64);
    let mut best = (x.round() as i64, 1i64);
    loop {
        let mid_n = lo_n + hi_n;
        let mid_d = lo_d + hi_d;
        if mid_d > max_den {
            break;
        }
        let mid = mid_n as f64 / mid_d as f64;
        if (mid - x).abs() < (best.0 as f64 / best.1 as f64 - x).abs() {
            best = (mid_n, mid_d);
        }
        if mid < x {
            lo_n = mid_n;
            lo_d = mid_d;
        } else if mid > x {
            hi_n = mid_n;
            hi_d = mid_d;
        } else {
            break;
        }
    }
    let r = ratio(best.0, best.1);
    if neg {
        -r
    } else {
        r
    }
}
