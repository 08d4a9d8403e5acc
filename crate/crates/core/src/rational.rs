//! Exact rational arithmetic and the extended cost value used for
//! infeasible strategies.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for `num / den` as a reduced big rational. Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"num/den"` or a bare integer `"num"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in rational {text:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in rational {text:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in rational {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical wire form: always `num/den`, reduced, denominator positive.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn is_nonnegative(value: &Rational) -> bool {
    !value.is_negative()
}

/// A cost that is either an exact rational or the absorbing infinite value
/// charged for strategies that overload an edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(Rational),
    Infinite,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Cost::Finite(value) => Some(value),
            Cost::Infinite => None,
        }
    }

    pub fn into_finite(self) -> Option<Rational> {
        match self {
            Cost::Finite(value) => Some(value),
            Cost::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Cost::Finite(value) => to_f64(value),
            Cost::Infinite => f64::INFINITY,
        }
    }
}

impl From<Rational> for Cost {
    fn from(value: Rational) -> Self {
        Cost::Finite(value)
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl<'a> Add<&'a Rational> for Cost {
    type Output = Cost;

    fn add(self, rhs: &'a Rational) -> Cost {
        match self {
            Cost::Finite(a) => Cost::Finite(a + rhs),
            Cost::Infinite => Cost::Infinite,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(value) => write!(f, "{}", format_rational(value)),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

/// Exact ratio with the degenerate `0/0` case reported as one and flagged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioValue {
    Exact(Rational),
    Infinite,
}

impl RatioValue {
    /// Returns the ratio and whether the `0/0` convention was applied.
    pub fn of(numerator: &Cost, denominator: &Rational) -> (RatioValue, bool) {
        match numerator {
            Cost::Infinite => (RatioValue::Infinite, false),
            Cost::Finite(num) if denominator.is_zero() => {
                if num.is_zero() {
                    (RatioValue::Exact(Rational::one()), true)
                } else {
                    (RatioValue::Infinite, false)
                }
            }
            Cost::Finite(num) => (RatioValue::Exact(num / denominator), false),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            RatioValue::Exact(value) => Some(value),
            RatioValue::Infinite => None,
        }
    }

    pub fn at_most(&self, bound: &Rational) -> bool {
        match self {
            RatioValue::Exact(value) => value <= bound,
            RatioValue::Infinite => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            RatioValue::Exact(value) => to_f64(value),
            RatioValue::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for RatioValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RatioValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RatioValue::Exact(a), RatioValue::Exact(b)) => a.cmp(b),
            (RatioValue::Exact(_), RatioValue::Infinite) => Ordering::Less,
            (RatioValue::Infinite, RatioValue::Exact(_)) => Ordering::Greater,
            (RatioValue::Infinite, RatioValue::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for RatioValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioValue::Exact(value) => write!(f, "{}", format_rational(value)),
            RatioValue::Infinite => write!(f, "inf"),
        }
    }
}

/// Serde adapter storing a rational as its `"num/den"` string.
pub mod serde_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}
