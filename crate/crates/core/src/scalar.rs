//! Arithmetic backends shared by the weight, rate and verification code.
//!
//! Everything numeric in the crate is generic over [`Scalar`]. Two backends
//! implement it: [`Rational`] (arbitrary precision, used for exact checks)
//! and `f64` (used for simulation). Products of many Pochhammer factors are
//! additionally available in log space, see [`crate::gibbs::log_weight`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Rational = num::BigRational;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic in this backend is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    /// Integer power with the convention `x^0 = 1` for every `x`, including 0.
    fn powi(&self, exp: i64) -> Self;

    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Canonical text form: `p/r` for rationals, shortest round-trip decimal for floats.
    fn to_text(&self) -> String;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rational as Zero>::zero()
    }

    fn one() -> Self {
        <Rational as One>::one()
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn powi(&self, exp: i64) -> Self {
        if exp == 0 {
            return <Rational as One>::one();
        }
        let pos = num::pow::pow(self.clone(), exp.unsigned_abs() as usize);
        if exp > 0 {
            pos
        } else {
            pos.recip()
        }
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn powi(&self, exp: i64) -> Self {
        if exp == 0 {
            1.0
        } else {
            f64::powi(*self, exp as i32)
        }
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }
}

/// A scalar as typed by a user. The syntax decides exactness: `3/4` and `2`
/// are exact, `0.75` and `1e-3` are floating point.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarInput {
    Exact(Rational),
    Float(f64),
}

impl ScalarInput {
    /// Integers carry no precision information and fit either backend.
    pub fn is_integer_literal(text: &str) -> bool {
        let t = text.trim();
        let t = t.strip_prefix(['-', '+']).unwrap_or(t);
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            ScalarInput::Exact(r) => Some(r.clone()),
            ScalarInput::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarInput::Exact(r) => Scalar::to_f64(r),
            ScalarInput::Float(f) => *f,
        }
    }
}

impl FromStr for ScalarInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::InvalidParameter("empty number".into()));
        }
        if let Some((num, den)) = t.split_once('/') {
            let n: BigInt = num
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad numerator in `{t}`")))?;
            let d: BigInt = den
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad denominator in `{t}`")))?;
            if Zero::is_zero(&d) {
                return Err(Error::InvalidParameter(format!("zero denominator in `{t}`")));
            }
            return Ok(ScalarInput::Exact(Rational::new(n, d)));
        }
        if Self::is_integer_literal(t) {
            let n: BigInt = t
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad integer `{t}`")))?;
            return Ok(ScalarInput::Exact(Rational::from_integer(n)));
        }
        let f: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("not a number: `{t}`")))?;
        if !f.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite number `{t}`")));
        }
        Ok(ScalarInput::Float(f))
    }
}

/// Parses `p/r` (or an integer) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    match s.parse::<ScalarInput>()? {
        ScalarInput::Exact(r) => Ok(r),
        ScalarInput::Float(_) => Err(Error::InvalidParameter(format!(
            "`{s}` is a decimal; exact input must be written as p/r"
        ))),
    }
}

/// Shorthand for building small exact rationals in code and tests.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_decides_exactness() {
        assert_eq!("1/2".parse::<ScalarInput>().unwrap(), ScalarInput::Exact(ratio(1, 2)));
        assert_eq!("4/8".parse::<ScalarInput>().unwrap(), ScalarInput::Exact(ratio(1, 2)));
        assert_eq!("3".parse::<ScalarInput>().unwrap(), ScalarInput::Exact(ratio(3, 1)));
        assert_eq!("0.5".parse::<ScalarInput>().unwrap(), ScalarInput::Float(0.5));
        assert_eq!("1e-3".parse::<ScalarInput>().unwrap(), ScalarInput::Float(1e-3));
        assert!("1/0".parse::<ScalarInput>().is_err());
        assert!("abc".parse::<ScalarInput>().is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn zero_to_the_zero_is_one() {
        assert_eq!(<Rational as Scalar>::zero().powi(0), <Rational as Scalar>::one());
        assert_eq!(0.0f64.powi(0), 1.0);
        assert_eq!(ratio(1, 2).powi(-2), ratio(4, 1));
        assert_eq!(ratio(2, 3).powi(3), ratio(8, 27));
    }
}
