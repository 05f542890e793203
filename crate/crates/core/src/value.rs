//! Exact vote values and their decimal renderings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// An exact quantity of votes (or a fraction of one paper).
pub type Value = BigRational;

pub fn from_int(n: u64) -> Value {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: u64, den: u64) -> Value {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn pow10(exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(10), exp)
}

/// Inserts a decimal point `places` digits from the right of `digits`,
/// which must be the decimal expansion of a non-negative integer.
fn place_point(digits: String, places: usize) -> String {
    if places == 0 {
        return digits;
    }
    let padded = if digits.len() <= places {
        format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
    } else {
        digits
    };
    let split = padded.len() - places;
    format!("{}.{}", &padded[..split], &padded[split..])
}

/// Renders `v` with exactly `places` digits after the point, rounding half
/// away from zero.
pub fn to_fixed(v: &Value, places: usize) -> String {
    let scaled = (v * BigRational::from_integer(pow10(places))).round();
    let n = scaled.to_integer();
    let body = place_point(n.abs().to_string(), places);
    if n.is_negative() {
        format!("-{body}")
    } else {
        body
    }
}

/// Renders `v` rounded to `digits` significant figures, dropping trailing
/// zeros, e.g. `0.032200` becomes `0.0322` and `1` stays `1`.
pub fn to_significant(v: &Value, digits: usize) -> String {
    assert!(digits > 0);
    if v.is_zero() {
        return "0".to_string();
    }
    let magnitude = v.abs();
    // Find e with 10^e <= |v| < 10^(e+1).
    let mut e: i64 =
        magnitude.numer().to_string().len() as i64 - magnitude.denom().to_string().len() as i64;
    let ten_pow = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(pow10(e as usize))
        } else {
            BigRational::new(BigInt::one(), pow10((-e) as usize))
        }
    };
    while ten_pow(e) > magnitude {
        e -= 1;
    }
    while ten_pow(e + 1) <= magnitude {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let mut n = (&magnitude * ten_pow(shift)).round().to_integer();
    let mut shift = shift;
    if n >= pow10(digits) {
        n /= BigInt::from(10);
        shift -= 1;
    }
    let body = if shift <= 0 {
        (n * pow10((-shift) as usize)).to_string()
    } else {
        let s = place_point(n.to_string(), shift as usize);
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    };
    if v.is_negative() {
        format!("-{body}")
    } else {
        body
    }
}

/// Serialized form of an exact value: numerator and denominator as decimal
/// integer strings plus a rounded decimal rendering for readers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRepr {
    pub num: String,
    pub den: String,
    pub decimal: String,
}

impl ValueRepr {
    /// Fixed-point rendering with six decimal places, used in transcripts.
    pub fn fixed(v: &Value) -> Self {
        Self::with_decimal(v, to_fixed(v, 6))
    }

    /// Four-significant-figure rendering, used in journey reports.
    pub fn significant(v: &Value) -> Self {
        Self::with_decimal(v, to_significant(v, 4))
    }

    fn with_decimal(v: &Value, decimal: String) -> Self {
        ValueRepr {
            num: v.numer().to_string(),
            den: v.denom().to_string(),
            decimal,
        }
    }

    /// Recovers the exact value; the decimal rendering is ignored.
    pub fn to_value(&self) -> Option<Value> {
        let num: BigInt = self.num.parse().ok()?;
        let den: BigInt = self.den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Value {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn fixed_rendering() {
        assert_eq!(to_fixed(&r(3, 10), 6), "0.300000");
        assert_eq!(to_fixed(&r(7, 1), 6), "7.000000");
        assert_eq!(to_fixed(&r(1, 3), 6), "0.333333");
        assert_eq!(to_fixed(&r(2, 3), 6), "0.666667");
        assert_eq!(to_fixed(&r(-1, 8), 2), "-0.13");
        assert_eq!(to_fixed(&r(-1, 1000), 2), "0.00");
        assert_eq!(to_fixed(&r(12345, 1), 0), "12345");
    }

    #[test]
    fn significant_rendering() {
        assert_eq!(to_significant(&r(322, 10000), 4), "0.0322");
        assert_eq!(to_significant(&r(32236, 1_000_000), 4), "0.03224");
        assert_eq!(to_significant(&r(1, 1), 4), "1");
        assert_eq!(to_significant(&r(0, 1), 4), "0");
        assert_eq!(to_significant(&r(9678, 10000), 4), "0.9678");
        assert_eq!(to_significant(&r(99999, 100000), 4), "1");
        assert_eq!(to_significant(&r(123456, 1), 4), "123500");
        assert_eq!(to_significant(&r(-3, 10), 4), "-0.3");
        assert_eq!(to_significant(&r(1, 3), 4), "0.3333");
        assert_eq!(to_significant(&r(10, 1), 4), "10");
    }

    #[test]
    fn repr_round_trips_exact_value() {
        let v = r(-22, 7);
        let repr = ValueRepr::fixed(&v);
        assert_eq!(repr.num, "-22");
        assert_eq!(repr.den, "7");
        assert_eq!(repr.to_value(), Some(v));
    }
}
