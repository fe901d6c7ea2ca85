//! Numeric field abstraction.
//!
//! Every solver in this crate is generic over [`Scalar`], which is implemented
//! for `f64` (the fast default) and [`Rational`] (arbitrary precision, used by
//! the test suite and by `--exact` on the command line).
//!
//! Float mode compares with a relative tolerance of `1e-9` and guards the
//! floor operations of the breakpoint sweep with an absolute `1e-12`. Rational
//! mode is exact and has no guards.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Relative tolerance used by float comparisons.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Absolute guard applied before flooring in float mode.
pub const FLOAT_FLOOR_GUARD: f64 = 1e-12;

pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Sum
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn from_usize(n: usize) -> Self;

    /// Exact conversion of a finite float; `None` for NaN or infinities.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Splits a non-negative number into `(floor, fractional part)`.
    ///
    /// In float mode the floor is taken of `x + 1e-12`, so values that are an
    /// integer up to rounding noise floor to that integer; the fractional part
    /// is then clamped to be non-negative.
    fn split_floor(&self) -> (usize, Self);

    /// Absolute slack allowed when testing a budget constraint.
    fn guard() -> Self;

    /// Equality up to the mode's tolerance.
    fn approx_eq(&self, other: &Self) -> bool;

    /// `self <= other` up to the mode's tolerance.
    fn approx_le(&self, other: &Self) -> bool {
        self <= other || self.approx_eq(other)
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Parses a decimal (`"0.25"`, `"3"`, `"1e-3"`) or a fraction (`"7/12"`).
    fn parse_number(s: &str) -> Option<Self>;
}

pub fn min_of<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_usize(n: usize) -> Self {
        n as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn split_floor(&self) -> (usize, Self) {
        let whole = (self + FLOAT_FLOOR_GUARD).floor().max(0.0);
        let frac = (self - whole).max(0.0);
        (whole as usize, frac)
    }

    fn guard() -> Self {
        FLOAT_FLOOR_GUARD
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1e-3);
        (self - other).abs() <= FLOAT_REL_TOL * scale
    }

    fn parse_number(s: &str) -> Option<Self> {
        let s = s.trim();
        let x = match s.split_once('/') {
            Some((num, den)) => num.trim().parse::<f64>().ok()? / den.trim().parse::<f64>().ok()?,
            None => s.parse::<f64>().ok()?,
        };
        x.is_finite().then_some(x)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_usize(n: usize) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_f64(x: f64) -> Option<Self> {
        Rational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn split_floor(&self) -> (usize, Self) {
        let whole = self.floor();
        let frac = self - &whole;
        let count = whole.to_integer().to_usize().unwrap_or(0);
        (count, frac)
    }

    fn guard() -> Self {
        Rational::zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn parse_number(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

/// Parses a fraction `a/b` or a decimal with optional exponent into an exact
/// rational. `"0.1"` becomes `1/10`, not the nearest binary float.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], i64::from_str(&s[pos + 1..]).ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    // Keep absurd exponents from allocating gigantic integers.
    if exponent.unsigned_abs() > 4096 || int_part.len() + frac_part.len() > 4096 {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits }).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, scale.unsigned_abs() as usize))
    };
    Some(value)
}

/// Renders a rational as `a/b`, or `a` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Formats a float with `digits` significant digits in plain positional
/// notation, trimming trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".to_string() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let mut out = format!("{x:.decimals$}");
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    if out == "-0" {
        out = "0".to_string();
    }
    out
}
