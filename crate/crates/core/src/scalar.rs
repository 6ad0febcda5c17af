//! Payoff and prior entries that stay exact when the input is rational.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A real number that is either held as an exact rational or as an `f64`.
///
/// Finite `f64` values convert to rationals without loss (every finite
/// double is a dyadic rational), so the exact paths only fail on NaN or
/// infinities.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Real(f64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Real(x) => *x,
        }
    }

    /// Exact value, or `None` for non-finite reals.
    pub fn to_exact(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact(r) => Some(r.clone()),
            Scalar::Real(x) => BigRational::from_float(*x),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Real(x) => x.is_finite(),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r.clone()),
            Scalar::Real(x) => Scalar::Real(-x),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r * BigRational::from_integer(BigInt::from(k))),
            Scalar::Real(x) => Scalar::Real(x * k as f64),
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", format_rational(r)),
            Scalar::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts integers, `a/b` fractions and decimal literals. Integers and
    /// fractions are kept exact.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Scalar::Exact(BigRational::from_integer(n)));
        }
        s.parse::<f64>().map(Scalar::Real).map_err(|_| bad())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Real(x) => serializer.serialize_f64(*x),
            Scalar::Exact(r) => {
                if r.is_integer() {
                    if let Some(n) = r.to_integer().to_i64() {
                        return serializer.serialize_i64(n);
                    }
                }
                let x = rational_to_f64(r);
                if BigRational::from_float(x).as_ref() == Some(r) {
                    serializer.serialize_f64(x)
                } else {
                    serializer.serialize_str(&format_rational(r))
                }
            }
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(Scalar::int(n)),
            // JSON decimals such as 0.5 are parsed as f64 and then held exactly.
            Raw::Float(x) => Ok(BigRational::from_float(x).map_or(Scalar::Real(x), Scalar::Exact)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        return x;
    }
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `"3"`, `"-1/2"`, and so on.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::Parse(format!("non-finite value {x} has no exact form")))
}

pub fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

pub fn is_nonnegative(r: &BigRational) -> bool {
    !r.is_negative()
}
