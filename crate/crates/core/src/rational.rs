//! Exact rational helpers shared by the classical and box-world code paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: fall back to scaled logs.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Base-2 logarithm of a positive rational, accurate even when numerator and
/// denominator overflow `f64`.
pub fn log2(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    log2_bigint(r.numer()) - log2_bigint(r.denom())
}

pub fn log2_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().abs().log2();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

/// Formats as `num/den`, or just `num` for integers.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"3/4"`, `"0.75"`, `"1"` or `"1e-2"` into an exact rational.
pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = |msg: &str| Error::Parse { path: text.to_string(), message: msg.to_string() };
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = text[pos + 1..].parse().map_err(|_| bad("bad exponent"))?;
            (&text[..pos], e)
        }
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" || digits.is_empty() {
        return Err(bad("empty number"));
    } else {
        digits
    };
    let n: BigInt = digits.parse().map_err(|_| bad("not a number"))?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::OutOfRange(format!("{x} is not finite")))
}

/// Serializes as the `num/den` string.
pub fn serialize<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format(r))
}

pub fn serialize_opt<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format(r)),
        None => s.serialize_none(),
    }
}

pub fn sum<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Rational {
    it.into_iter().fold(zero(), |acc, x| acc + x)
}
