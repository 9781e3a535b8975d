//! Exact dyadic rationals `numerator / 2^exponent`.
//!
//! Every coefficient and every deterministic or mixture-derived probability in
//! this crate is dyadic, so a single power-of-two denominator is enough to keep
//! those pipelines free of rounding.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A dyadic rational `numerator / 2^exponent`.
///
/// Values are kept canonical: either the exponent is zero or the numerator is
/// odd, and zero is always `0 / 2^0`. Equality is therefore structural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    numerator: i64,
    exponent: u32,
}

impl ExactScalar {
    pub const ZERO: ExactScalar = ExactScalar { numerator: 0, exponent: 0 };
    pub const ONE: ExactScalar = ExactScalar { numerator: 1, exponent: 0 };

    pub fn new(numerator: i64, exponent: u32) -> Self {
        Self::from_wide(numerator as i128, exponent)
    }

    pub fn from_int(n: i64) -> Self {
        Self { numerator: n, exponent: 0 }
    }

    /// `2^{-k}`.
    pub fn pow2_neg(k: u32) -> Self {
        Self { numerator: 1, exponent: k }
    }

    /// Builds a canonical value from a wide numerator.
    ///
    /// Panics if the reduced numerator does not fit in an `i64`; no quantity
    /// produced for at most twelve parties comes close.
    pub(crate) fn from_wide(mut numerator: i128, mut exponent: u32) -> Self {
        if numerator == 0 {
            return Self::ZERO;
        }
        let tz = numerator.trailing_zeros().min(exponent);
        numerator >>= tz;
        exponent -= tz;
        let numerator = i64::try_from(numerator).expect("dyadic numerator overflow");
        Self { numerator, exponent }
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn signum(&self) -> i64 {
        self.numerator.signum()
    }

    pub fn abs(self) -> Self {
        Self { numerator: self.numerator.abs(), exponent: self.exponent }
    }

    /// Multiplies by `2^{-1}`.
    pub fn halve(self) -> Self {
        self.scale_pow2(-1)
    }

    /// Multiplies by `2^k` for a signed `k`.
    pub fn scale_pow2(self, k: i32) -> Self {
        if self.is_zero() {
            return self;
        }
        if k >= 0 {
            let k = k as u32;
            let shift = k.min(self.exponent);
            let rest = k - shift;
            Self::from_wide((self.numerator as i128) << rest, self.exponent - shift)
        } else {
            Self::from_wide(self.numerator as i128, self.exponent + k.unsigned_abs())
        }
    }

    /// Numerator rescaled to denominator `2^exponent`; `None` if this value
    /// needs a finer denominator.
    pub fn numerator_at(&self, exponent: u32) -> Option<i128> {
        if exponent < self.exponent {
            return None;
        }
        Some((self.numerator as i128) << (exponent - self.exponent))
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.exponent as i32)
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;

    fn add(self, rhs: Self) -> Self {
        let e = self.exponent.max(rhs.exponent);
        let a = (self.numerator as i128) << (e - self.exponent);
        let b = (rhs.numerator as i128) << (e - rhs.exponent);
        Self::from_wide(a + b, e)
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;

    fn neg(self) -> Self {
        Self { numerator: -self.numerator, exponent: self.exponent }
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;

    fn mul(self, rhs: Self) -> Self {
        Self::from_wide(
            self.numerator as i128 * rhs.numerator as i128,
            self.exponent + rhs.exponent,
        )
    }
}

impl Sum for ExactScalar {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = (self.numerator as i128) << (e - self.exponent);
        let b = (other.numerator as i128) << (e - other.exponent);
        a.cmp(&b)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

/// Rational decimal form: `"1"`, `"-1/4"`, `"7/4"`.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, 1u128 << self.exponent)
        }
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("not a dyadic rational: `{s}`"));
        let s = s.trim();
        match s.split_once('/') {
            None => s.parse::<i64>().map(Self::from_int).map_err(|_| bad()),
            Some((num, den)) => {
                let num: i64 = num.trim().parse().map_err(|_| bad())?;
                let den: u128 = den.trim().parse().map_err(|_| bad())?;
                if den == 0 || !den.is_power_of_two() {
                    return Err(bad());
                }
                Ok(Self::new(num, den.trailing_zeros()))
            }
        }
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A computed quantity that is exact when its inputs were.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Exact(ExactScalar),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(v) => v.to_f64(),
            Value::Float(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<ExactScalar> {
        match self {
            Value::Exact(v) => Some(*v),
            Value::Float(_) => None,
        }
    }

    pub fn representation(&self) -> &'static str {
        match self {
            Value::Exact(_) => "exact",
            Value::Float(_) => "floating",
        }
    }

    /// Rational string for exact values, plain number otherwise.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Exact(v) => serde_json::Value::String(v.to_string()),
            Value::Float(v) => serde_json::json!(v),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => v.fmt(f),
            Value::Float(v) => v.fmt(f),
        }
    }
}
