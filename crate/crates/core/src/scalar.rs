//! Scalar backends: exact rationals and binary floats.
//!
//! Everything above this module is written against [`Scalar`]. The exact
//! backend ([`Rational`]) compares with zero tolerance; the float backend
//! compares with [`FLOAT_TOLERANCE`].

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Comparison tolerance of the float backend.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Field operations plus the few extras the geometry needs.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic and comparisons are exact.
    const EXACT: bool;

    /// Absolute tolerance used by [`Scalar::is_negligible`]; zero when exact.
    fn tolerance() -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Nearest multiple of `1/denom` to `x` (exact backend); `x` itself for floats.
    fn round_from_f64(x: f64, denom: u64) -> Self;

    /// Nearest multiple of `1/denom` (ties away from zero); identity for floats.
    fn round_to(&self, denom: u64) -> Self;

    /// A value `u` with `u >= 0` and `u*u >= self` (self must be non-negative).
    fn sqrt_upper(&self) -> Self;

    /// A value `l` with `0 <= l` and `l*l <= self` (self must be non-negative).
    fn sqrt_lower(&self) -> Self;

    fn to_json(&self) -> Value;

    fn from_json(value: &Value) -> Result<Self>;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }

    /// `self > 0` beyond tolerance.
    fn is_strictly_positive(&self) -> bool {
        *self > Self::tolerance()
    }

    /// `self >= 0` up to tolerance.
    fn is_nonnegative(&self) -> bool {
        *self >= -Self::tolerance()
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits the scalar backend")
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn round_from_f64(x: f64, denom: u64) -> Self {
        let scaled = (x * denom as f64).round();
        let numer = BigInt::from_f64(scaled).unwrap_or_else(BigInt::zero);
        Rational::new(numer, BigInt::from(denom))
    }

    fn round_to(&self, denom: u64) -> Self {
        let d = BigInt::from(denom);
        let scaled = self * Rational::from_integer(d.clone());
        Rational::new(scaled.round().to_integer(), d)
    }

    fn sqrt_upper(&self) -> Self {
        if self.is_zero() {
            return Rational::zero();
        }
        if let Some(exact) = exact_sqrt(self) {
            return exact;
        }
        // Start from the float estimate and bump until the bound is verified.
        let approx = self.to_f64().unwrap_or(f64::MAX).sqrt();
        let mut candidate = Rational::round_from_f64(approx * (1.0 + 1e-12) + 1e-300, 1 << 40);
        let step = Rational::new(BigInt::one(), BigInt::from(1u64 << 40));
        let mut bump = step;
        while &candidate * &candidate < *self {
            candidate += bump.clone();
            bump *= BigInt::from(2);
        }
        candidate
    }

    fn sqrt_lower(&self) -> Self {
        if self.is_zero() {
            return Rational::zero();
        }
        if let Some(exact) = exact_sqrt(self) {
            return exact;
        }
        let approx = self.to_f64().unwrap_or(0.0).sqrt();
        let mut candidate = Rational::round_from_f64(approx * (1.0 - 1e-12), 1 << 40);
        if candidate.is_negative() {
            candidate = Rational::zero();
        }
        let mut shrink = Rational::new(BigInt::from(1), BigInt::from(2));
        while &candidate * &candidate > *self {
            candidate = &candidate * &shrink;
            shrink = &shrink * &shrink;
        }
        candidate
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::input(format!("expected a rational, found {other}"))),
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn round_from_f64(x: f64, _denom: u64) -> Self {
        x
    }

    fn round_to(&self, _denom: u64) -> Self {
        *self
    }

    fn sqrt_upper(&self) -> Self {
        self.max(0.0).sqrt()
    }

    fn sqrt_lower(&self) -> Self {
        self.max(0.0).sqrt()
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::input(format!("bad float literal {n}"))),
            Value::String(s) => parse_rational(s)
                .map(|r| r.to_f64().unwrap_or(f64::NAN))
                .or_else(|_| {
                    s.parse::<f64>()
                        .map_err(|_| Error::input(format!("bad float literal {s:?}")))
                }),
            other => Err(Error::input(format!("expected a number, found {other}"))),
        }
    }
}

fn exact_sqrt(x: &Rational) -> Option<Rational> {
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"`, `"p"`, or an exact decimal literal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::input(format!("not a rational literal: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::input(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    // decimal with optional exponent
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str_radix(&digits, 10).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Least common multiple of all denominators; useful for reporting growth.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// serde adapter for scalar fields (`#[serde(with = "crate::scalar::serde_scalar")]`).
pub mod serde_scalar {
    use super::Scalar;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Scalar, Ser: Serializer>(x: &S, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        serde::Serialize::serialize(&x.to_json(), ser)
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(de: D) -> Result<S, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        S::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Vec<S>`.
pub mod serde_scalars {
    use super::Scalar;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Scalar, Ser: Serializer>(
        xs: &[S],
        ser: Ser,
    ) -> Result<Ser::Ok, Ser::Error> {
        let v: Vec<serde_json::Value> = xs.iter().map(Scalar::to_json).collect();
        serde::Serialize::serialize(&v, ser)
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(de: D) -> Result<Vec<S>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(de)?;
        v.iter()
            .map(|x| S::from_json(x).map_err(serde::de::Error::custom))
            .collect()
    }
}
