//! Exact rational helpers shared by every module.
//!
//! Distances, probabilities and thresholds are compared exactly, so all of
//! them are arbitrary-precision rationals.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_usize(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn two_thirds() -> Rational {
    ratio(2, 3)
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.11`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// `p/q` with the sign on the numerator; integers print without a denominator.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ceil_to_biguint(r: &Rational) -> BigUint {
    assert!(!r.is_negative(), "ceil_to_biguint on a negative value");
    r.ceil().to_integer().to_biguint().expect("non-negative")
}

pub fn floor_to_u64(r: &Rational) -> Option<u64> {
    r.floor().to_integer().to_u64()
}

pub fn round_to_biguint(r: &Rational) -> BigUint {
    assert!(!r.is_negative(), "round_to_biguint on a negative value");
    let (q, rem) = r.numer().div_rem(r.denom());
    let twice = rem * 2;
    let q = if &twice >= r.denom() { q + 1 } else { q };
    q.to_biguint().expect("non-negative")
}

/// Best-effort conversion for display and floating-point calculators.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to log-domain division for values outside f64's exact range.
        let n = big_log2(&r.numer().abs().to_biguint().unwrap());
        let d = big_log2(&r.denom().to_biguint().unwrap());
        let v = (n - d).exp2();
        if r.is_negative() { -v } else { v }
    })
}

/// log2 of a positive big integer, accurate to f64 precision.
pub fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}

/// `base^exp` for rationals by repeated squaring.
pub fn pow(base: &Rational, exp: u64) -> Rational {
    let mut result = Rational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}
