//! Exact scalar type and small vector helpers.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zeros(len: usize) -> Vec<Rational> {
    vec![Rational::zero(); len]
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn scale(v: &[Rational], s: &Rational) -> Vec<Rational> {
    v.iter().map(|x| x * s).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Error returned when a string is not an integer or a `p/q` fraction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct RationalParseError(pub String);

/// Parses `"7"`, `"-3/4"`, `" 10/-4 "`. Fractions need not be reduced.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let t = text.trim();
    let err = || RationalParseError(text.to_string());
    match t.split_once('/') {
        None => BigInt::from_str(t).map(Rational::from_integer).map_err(|_| err()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// `p/q` or `p` when the denominator is one.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion used only for plotting.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(if r.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// A value of the extended real line, used where an LP may be unbounded or
/// infeasible (value functions, support functions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extended {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }
}

impl std::fmt::Display for Extended {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::Finite(v) => f.write_str(&fmt_rational(v)),
            Extended::PosInf => f.write_str("+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_reduces() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("10/-4").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational(" -7 ").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn formats_integers_without_denominator() {
        assert_eq!(fmt_rational(&rat(4, 2)), "2");
        assert_eq!(fmt_rational(&rat(-22, 21)), "-22/21");
    }
}
