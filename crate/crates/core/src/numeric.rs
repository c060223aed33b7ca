//! Numeric modes.
//!
//! Everything that computes a weight is generic over [`Scalar`], which is
//! implemented for exact rationals ([`Rational`]), plain `f64`, and the
//! sign/log-magnitude [`LogWeight`] used for quantities like `(1+λ)^{n/2}`
//! that overflow `f64` on larger graphs.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True for arithmetic where equality is exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_bigint(x: &BigInt) -> Self;

    fn from_u64(x: u64) -> Self {
        Self::from_bigint(&BigInt::from(x))
    }

    fn as_f64(&self) -> f64;

    /// Natural log of the magnitude.
    fn ln_abs(&self) -> f64 {
        self.as_f64().abs().ln()
    }

    fn abs(&self) -> Self;

    fn powu(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }

    /// `e^self`, or `None` when the mode cannot represent it.
    fn exp(&self) -> Option<Self>;

    fn sum_all<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, t| acc + t)
    }

    fn to_json(&self) -> serde_json::Value;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_bigint(x: &BigInt) -> Self {
        BigRational::from_integer(x.clone())
    }

    fn as_f64(&self) -> f64 {
        // Large numerators and denominators overflow individually even when
        // the quotient is representable; fall back to a log-scale quotient.
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let sign = if self.is_negative() { -1.0 } else { 1.0 };
                sign * (bigint_ln(&self.numer().abs()) - bigint_ln(self.denom())).exp()
            }
        }
    }

    fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        bigint_ln(&self.numer().abs()) - bigint_ln(self.denom())
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn exp(&self) -> Option<Self> {
        if self.is_zero() {
            Some(Self::one())
        } else {
            None
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "exact": self.to_string(), "value": self.as_f64() })
    }
}

fn bigint_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().map_or(f64::NAN, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_bigint(x: &BigInt) -> Self {
        x.to_f64().unwrap_or(f64::NAN)
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn powu(&self, exp: u32) -> Self {
        self.powi(exp as i32)
    }

    fn exp(&self) -> Option<Self> {
        Some(f64::exp(*self))
    }

    /// Neumaier-compensated summation; cluster weights alternate in sign.
    fn sum_all<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for t in terms {
            let s = sum + t;
            if sum.abs() >= t.abs() {
                comp += (sum - s) + t;
            } else {
                comp += (t - s) + sum;
            }
            sum = s;
        }
        sum + comp
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "value": self })
    }
}

/// A real number stored as sign and natural log of its magnitude.
#[derive(Clone, Copy, Debug)]
pub struct LogWeight {
    sign: i8,
    ln_mag: f64,
}

impl LogWeight {
    pub fn from_ln(ln_mag: f64) -> Self {
        if ln_mag == f64::NEG_INFINITY {
            Self::zero()
        } else {
            LogWeight { sign: 1, ln_mag }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::zero()
        } else {
            LogWeight {
                sign: if x < 0.0 { -1 } else { 1 },
                ln_mag: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn ln_magnitude(&self) -> f64 {
        self.ln_mag
    }
}

impl PartialEq for LogWeight {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || self.ln_mag == other.ln_mag)
    }
}

impl PartialOrd for LogWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.ln_mag.partial_cmp(&other.ln_mag),
                _ => other.ln_mag.partial_cmp(&self.ln_mag),
            },
            ord => Some(ord),
        }
    }
}

impl Add for LogWeight {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_mag >= rhs.ln_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let ratio = (small.ln_mag - big.ln_mag).exp();
        if big.sign == small.sign {
            LogWeight {
                sign: big.sign,
                ln_mag: big.ln_mag + ratio.ln_1p(),
            }
        } else if ratio == 1.0 {
            Self::zero()
        } else {
            LogWeight {
                sign: big.sign,
                ln_mag: big.ln_mag + (-ratio).ln_1p(),
            }
        }
    }
}

impl Neg for LogWeight {
    type Output = Self;
    fn neg(self) -> Self {
        LogWeight {
            sign: -self.sign,
            ln_mag: self.ln_mag,
        }
    }
}

impl Sub for LogWeight {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for LogWeight {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::zero();
        }
        LogWeight {
            sign: self.sign * rhs.sign,
            ln_mag: self.ln_mag + rhs.ln_mag,
        }
    }
}

impl Div for LogWeight {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return Self::zero();
        }
        LogWeight {
            sign: self.sign * rhs.sign,
            ln_mag: self.ln_mag - rhs.ln_mag,
        }
    }
}

impl Zero for LogWeight {
    fn zero() -> Self {
        LogWeight {
            sign: 0,
            ln_mag: f64::NEG_INFINITY,
        }
    }
    fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

impl One for LogWeight {
    fn one() -> Self {
        LogWeight { sign: 1, ln_mag: 0.0 }
    }
}

impl Display for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.as_f64();
        if v.is_finite() && (v == 0.0 || v.abs() > 1e-300) {
            write!(f, "{v}")
        } else {
            let s = if self.sign < 0 { "-" } else { "" };
            write!(f, "{s}exp({})", self.ln_mag)
        }
    }
}

impl Scalar for LogWeight {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        LogWeight::from_f64(num as f64 / den as f64)
    }

    fn from_bigint(x: &BigInt) -> Self {
        let r = Rational::from_integer(x.clone());
        let sign = if x.is_negative() { -1 } else if x.is_zero() { 0 } else { 1 };
        LogWeight {
            sign,
            ln_mag: r.ln_abs(),
        }
    }

    fn as_f64(&self) -> f64 {
        self.sign as f64 * self.ln_mag.exp()
    }

    fn ln_abs(&self) -> f64 {
        self.ln_mag
    }

    fn abs(&self) -> Self {
        LogWeight {
            sign: self.sign.abs(),
            ln_mag: self.ln_mag,
        }
    }

    fn powu(&self, exp: u32) -> Self {
        if exp == 0 {
            return Self::one();
        }
        if self.sign == 0 {
            return Self::zero();
        }
        let sign = if self.sign < 0 && exp % 2 == 1 { -1 } else { 1 };
        LogWeight {
            sign,
            ln_mag: self.ln_mag * exp as f64,
        }
    }

    fn exp(&self) -> Option<Self> {
        Some(LogWeight::from_ln(self.as_f64()))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "value": self.as_f64(), "ln_abs": self.ln_mag, "sign": self.sign })
    }
}

/// Parses `3`, `-2`, `0.25`, `1/3` or `1e-3` as an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidParams(format!("cannot parse `{text}` as a rational number"));
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Converts an exact rational into another numeric mode.
pub fn convert<S: Scalar>(x: &Rational) -> S {
    if x.is_zero() {
        return S::zero();
    }
    S::from_bigint(x.numer()) / S::from_bigint(x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_rational("0.3").unwrap(), r(3, 10));
        assert_eq!(parse_rational("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), r(-5, 4));
        assert_eq!(parse_rational("2e-3").unwrap(), r(1, 500));
        assert_eq!(parse_rational("7").unwrap(), r(7, 1));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn log_weight_arithmetic_matches_f64() {
        let vals = [3.5, -2.0, 0.0, 1e-5, 7.25];
        for &a in &vals {
            for &b in &vals {
                let la = LogWeight::from_f64(a);
                let lb = LogWeight::from_f64(b);
                let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1.0);
                assert!(close((la + lb).as_f64(), a + b));
                assert!(close((la - lb).as_f64(), a - b));
                assert!(close((la * lb).as_f64(), a * b));
                if b != 0.0 {
                    assert!(close((la / lb).as_f64(), a / b));
                }
                assert_eq!(la.partial_cmp(&lb), a.partial_cmp(&b));
            }
        }
    }

    #[test]
    fn log_weight_survives_overflow() {
        let base = LogWeight::from_f64(11.0);
        let big = base.powu(1000);
        assert!(big.as_f64().is_infinite());
        assert!((big.ln_abs() - 1000.0 * 11f64.ln()).abs() < 1e-9);
        let ratio = big / base.powu(999);
        assert!((ratio.as_f64() - 11.0).abs() < 1e-9);
    }

    #[test]
    fn rational_to_f64_handles_huge_parts() {
        let big = num_traits::pow(BigInt::from(3), 2000);
        let x = BigRational::new(big.clone() * 2, big);
        assert!((x.as_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(<f64 as Scalar>::sum_all(terms), 2.0);
    }
}
