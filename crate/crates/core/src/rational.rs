//! Exact rational helpers shared by the geometry and partition code.
//!
//! Every `f64` is a dyadic rational, so conversions from floats are exact;
//! that is what lets the packing and gauge code run its strict inequalities
//! without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A point with exact coordinates.
pub type RPoint = Vec<Rational>;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `2^e` for any (possibly negative) exponent.
pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << (e as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

/// `k / 2^level`.
pub fn dyadic(k: i64, level: i32) -> Rational {
    int(k) * pow2(-(level as i64))
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Input(format!("non-finite value {x}")))
}

pub fn point_from_f64(x: &[f64]) -> Result<RPoint> {
    x.iter().map(|&v| from_f64(v)).collect()
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to a scaled division.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn point_to_f64(x: &[Rational]) -> Vec<f64> {
    x.iter().map(to_f64).collect()
}

pub fn sq(x: &Rational) -> Rational {
    x * x
}

pub fn dist_sq(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(p, q)| sq(&(p - q))).fold(Rational::zero(), |s, t| s + t)
}

/// Parses `"p/q"`, integers and plain decimals such as `"0.36"` (exactly).
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Input(format!("cannot parse rational `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Input(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let negative = mantissa.starts_with('-');
    let digits = mantissa.trim_start_matches(['-', '+']);
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let all: String = format!("{whole}{frac}");
    let mut num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    if negative {
        num = -num;
    }
    let scale = exp - frac.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    let mut r = Rational::from_integer(num);
    if scale >= 0 {
        for _ in 0..scale {
            r *= &ten;
        }
    } else {
        for _ in 0..(-scale) {
            r /= &ten;
        }
    }
    Ok(r)
}

/// Canonical `"p/q"` rendering used by every file format.
pub fn format(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Smallest integer `>= x`.
pub fn ceil_i64(x: &Rational) -> i64 {
    x.ceil().to_integer().to_i64().expect("coordinate out of i64 range")
}

pub fn floor_i64(x: &Rational) -> i64 {
    x.floor().to_integer().to_i64().expect("coordinate out of i64 range")
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

/// Serde adapter: rationals as `"p/q"` strings; numbers are accepted on input.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_json(&v).map_err(serde::de::Error::custom)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Rational> {
        match v {
            serde_json::Value::String(s) => parse(s),
            serde_json::Value::Number(n) => parse(&n.to_string()),
            other => Err(Error::Input(format!("expected rational, found {other}"))),
        }
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = x.iter().map(format).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(serde_rational::from_json)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for lists of `[lo, hi]` pairs.
pub mod serde_rational_pairs {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[(Rational, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[String; 2]> = x.iter().map(|(a, b)| [format(a), format(b)]).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(Rational, Rational)>, D::Error> {
        let v = Vec::<[serde_json::Value; 2]>::deserialize(d)?;
        v.iter()
            .map(|[a, b]| Ok((serde_rational::from_json(a)?, serde_rational::from_json(b)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)
    }
}
