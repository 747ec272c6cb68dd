//! Number types used for scores.
//!
//! [`Rational`] (arbitrary precision) is the default for ordinal
//! aggregation. `f64` is accepted everywhere a [`Scalar`] is, with equality
//! relaxed to a relative tolerance of `1e-9`.

use alloc::string::ToString;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational number with big-integer numerator and denominator.
pub type Rational = num_rational::BigRational;

/// Relative tolerance used by `f64` comparisons.
pub const FLOAT_REL_EPS: f64 = 1e-9;

/// Arithmetic needed by score tables and aggregation.
///
/// `approx_cmp` is exact for [`Rational`] and tolerant for `f64`;
/// `total_cmp` is always a total order.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_rational(&self) -> Rational;
    fn total_cmp(&self, other: &Self) -> Ordering;
    fn approx_cmp(&self, other: &Self) -> Ordering;

    /// Whether `self` is zero relative to `scale`.
    fn is_negligible(&self, scale: &Self) -> bool;

    fn approx_eq(&self, other: &Self) -> bool {
        self.approx_cmp(other) == Ordering::Equal
    }

    fn is_positive(&self) -> bool {
        self.approx_cmp(&Self::zero()) == Ordering::Greater
    }

    fn powu(&self, exp: u32) -> Self {
        num_traits::pow::pow(Wrap(self.clone()), exp as usize).0
    }

    fn mul_count(&self, count: u32) -> Self {
        self.clone() * Self::from_i64(i64::from(count))
    }
}

// `num_traits::pow` wants `One + Mul`; this adapter avoids demanding those
// bounds on every `Scalar`.
#[derive(Clone)]
struct Wrap<S>(S);

impl<S: Scalar> Mul for Wrap<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Wrap(self.0 * rhs.0)
    }
}

impl<S: Scalar> One for Wrap<S> {
    fn one() -> Self {
        Wrap(S::one())
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn approx_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn is_negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }

    fn mul_count(&self, count: u32) -> Self {
        self * BigInt::from(count)
    }
}

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

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        rationalize(*self)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn approx_cmp(&self, other: &Self) -> Ordering {
        let scale = libm::fmax(libm::fabs(*self), libm::fabs(*other));
        if libm::fabs(self - other) <= FLOAT_REL_EPS * scale {
            Ordering::Equal
        } else {
            f64::total_cmp(self, other)
        }
    }

    fn is_negligible(&self, scale: &Self) -> bool {
        libm::fabs(*self) <= FLOAT_REL_EPS * libm::fabs(*scale)
    }

    fn powu(&self, exp: u32) -> Self {
        libm::pow(*self, f64::from(exp))
    }
}

/// Continued-fraction approximation of `x` with relative error below `1e-12`.
///
/// Non-finite input maps to zero.
pub fn rationalize(x: f64) -> Rational {
    if !x.is_finite() || x == 0.0 {
        return <Rational as Zero>::zero();
    }
    let target = Rational::from_float(x).unwrap_or_else(<Rational as Zero>::zero);
    let tol = libm::fabs(x) * 1e-12;

    // Convergents h/k of the exact binary value.
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    loop {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        let approx = Rational::new(h2.clone(), k2.clone());
        let frac = &rest - Rational::from_integer(a);
        if libm::fabs(Scalar::to_f64(&(&approx - &target))) <= tol || frac.is_zero() {
            return approx;
        }
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        rest = frac.recip();
    }
}

/// Parses `7`, `-0.25`, `3/4`, `1.5e-3` or `2/0.5` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = || Error::ParseNumber(text.to_string());
    let text = text.trim();
    match text.split_once('/') {
        Some((num, den)) => {
            let num = parse_decimal(num.trim()).ok_or_else(err)?;
            let den = parse_decimal(den.trim()).ok_or_else(err)?;
            if den.is_zero() {
                return Err(err());
            }
            Ok(num / den)
        }
        None => parse_decimal(text).ok_or_else(err),
    }
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let mut numer = BigInt::zero();
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numer = numer * 10u32 + u32::from(b - b'0');
    }
    let shift = exponent.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        Rational::from_integer(numer * num_traits::pow::pow(ten, shift as usize))
    } else {
        Rational::new(
            numer,
            num_traits::pow::pow(ten, shift.unsigned_abs() as usize),
        )
    };
    Some(if negative { -value } else { value })
}

/// The rational with the smallest denominator strictly inside `(lo, hi)`.
///
/// Stern–Brocot descent, run-length encoded as a continued-fraction
/// recursion so that narrow intervals stay cheap.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Result<Rational> {
    if lo >= hi {
        return Err(Error::Degenerate("empty interval".to_string()));
    }
    Ok(simplest_open(lo, hi))
}

fn simplest_open(lo: &Rational, hi: &Rational) -> Rational {
    let floor = lo.floor();
    let next = &floor + <Rational as One>::one();
    if &next < hi {
        return next;
    }
    // lo - floor in [0, 1), hi - floor in (0, 1]; write x = floor + 1/y.
    let upper_gap = hi - &floor;
    if lo == &floor {
        let y = (upper_gap.recip()).floor() + <Rational as One>::one();
        return floor + y.recip();
    }
    let lower_gap = lo - &floor;
    let y = simplest_open(&upper_gap.recip(), &lower_gap.recip());
    floor + y.recip()
}

/// Smallest integer `n >= 1` with `n * coeff > bound`, for `coeff > 0`.
pub(crate) fn smallest_integer_exceeding(bound: &Rational, coeff: &Rational) -> BigInt {
    let ratio = bound / coeff;
    let floor = ratio.floor().to_integer();
    let candidate = floor + BigInt::one();
    if candidate.is_positive() {
        candidate
    } else {
        BigInt::one()
    }
}
